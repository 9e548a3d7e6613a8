// Closed-form minimum mean-square errors for tracking, prediction and
// smoothing of the OU phase.
#pragma once

#include "phasetrack/interferometer.hpp"
#include "phasetrack/ou_process.hpp"
#include "phasetrack/wiener.hpp"

namespace phasetrack {

/// ξ = K_d(0) - ∫₀^∞ K_dz²(τ) dτ together with its two terms.
struct MseBreakdown {
    double xi = 0.0;
    double prior_variance = 0.0;        ///< κ/2λ
    double information_integral = 0.0;  ///< ∫₀^∞ K_dz²
    EstimationMode mode = EstimationMode::tracking;
    double epsilon = 0.0;
    double information = 0.0;  ///< Λ (Λ₁ for MZI) used in the formulas
    double sigma_f_sq = 0.0;   ///< tracking MSE that set the noise level
};

/**
 * Self-consistent NLI tracking MSE (explicit root of the implicit
 * equation σ_f² = (κ/2λ)[1 - Λ(σ_f²)/(1+√(1+Λ(σ_f²)))²]):
 *
 *   σ_f² = [-(λ - G²g²κ) + √((λ - G²g²κ)² + 4G²g²(|β|²/(G²+g²) + λ)κ)]
 *          / [4G²g²(|β|²/(G²+g²) + λ)]
 */
double tracking_mse_nli(const InterferometerConfig& config, const ProcessParams& p);

/// (κ/2λ)[1 - Λ₁/(1+√(1+Λ₁))²], Λ₁ = |β|²κ/λ².
double tracking_mse_mzi(const InterferometerConfig& config, const ProcessParams& p);

/// Dispatches on the instrument kind.
double tracking_mse(const InterferometerConfig& config, const ProcessParams& p);

/// Photocurrent model with σ_f² set to the closed-form tracking MSE.
PhotocurrentModel photocurrent_model(const InterferometerConfig& config, const ProcessParams& p);

ObservationSpectrum observation_spectrum(const InterferometerConfig& config,
                                         const ProcessParams& p);

/// (κ/2λ)[1 - Λ/(1+√(1+Λ))²] = (κ/λ)/(1+√(1+Λ))
double tracking_mse_for_information(const ProcessParams& p, double information);

/**
 * Offset MSE at fixed Λ:
 *   ε > 0  (κ/2λ)[1 - Λ/(1+√(1+Λ))²·e^{-2λε}]
 *   ε < 0  (κ/2λ)[1/√(1+Λ) + Λe^{2λ√(1+Λ)ε}/((1+√(1+Λ))²√(1+Λ))]
 *   ε = 0  tracking value (both branches agree there)
 */
double offset_mse_for_information(const ProcessParams& p, double information, double epsilon);

/// ∫₀^∞ K_dz²(τ) dτ
double information_integral(const ObservationSpectrum& obs, double epsilon);

/**
 * MSE at offset ε. For the NLI, Λ uses the noise level set by the
 * tracking σ_f² regardless of ε, since the feedback loop is driven by the
 * causal tracking estimate.
 */
MseBreakdown offset_mse(const InterferometerConfig& config, const ProcessParams& p, double epsilon);

/// Smoothing floor, ξ as ε -> -∞: (κ/2λ)/√(1+Λ).
double smoothing_floor_mse(const InterferometerConfig& config, const ProcessParams& p);

struct FixedPointResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Damped iteration x <- (1-α)x + α·rhs(x) of the implicit NLI tracking
 * equation, started from κ/2λ. Cross-check for tracking_mse_nli.
 */
FixedPointResult tracking_mse_fixed_point(const InterferometerConfig& config,
                                          const ProcessParams& p, double damping = 0.5,
                                          double tolerance = 1e-12, int max_iterations = 10000);

}  // namespace phasetrack
