// Parametric-gain optimization at fixed photon flux and the asymptotic
// (Heisenberg-scaling) formulas with their reference bounds.
#pragma once

#include "phasetrack/ou_process.hpp"

#include <string>
#include <vector>

namespace phasetrack {

enum class GainObjective { tracking, smoothing_floor };

const char* to_string(GainObjective objective);

struct GainSearchOptions {
    double max_gain_sq = 1e4;
    int grid_points = 400;
    double tolerance = 1e-4;  ///< final |ΔG²|
};

struct GainOptimum {
    double gain_sq = 0.0;
    double mse = 0.0;
    int evaluations = 0;
    bool flat = false;  ///< objective did not vary over the scan
};

/**
 * argmin over G² in (1, max_gain_sq] of the closed-form NLI MSE.
 *
 * A log-spaced scan of g² = G² - 1 brackets the minimum (ties go to the
 * smaller G²), then golden-section search refines it.
 */
GainOptimum optimize_gain(const ProcessParams& p, double photon_flux, GainObjective objective,
                          const GainSearchOptions& options = {});

/**
 * Gain where ∂SNR_NLI/∂G² = 0 at fixed σ_f² meets the tracking MSE, i.e.
 * the root of σ_f²(G²) = 4[2G²(G²-1)+1]/[4G²(G²-1)]². Coincides with the
 * MSE optimum only asymptotically.
 */
double snr_optimal_gain(const ProcessParams& p, double photon_flux,
                        const GainSearchOptions& options = {});

/// G_o² ≈ (|β|²κ²)^{1/3} / (2^{2/3} κ)
double asymptotic_optimal_gain(const ProcessParams& p, double photon_flux);

struct AsymptoticEstimate {
    double mse = 0.0;
    double gain_sq = 0.0;      ///< asymptotic G_o²
    double consistency = 0.0;  ///< 1/(2G_o⁴) for the tracking estimate
    std::vector<std::string> warnings;
};

/**
 * σ_f² ≈ 2^{1/3}(κ/|β|²)^{2/3}. Warns unless G_o² ≫ 1, |β|²/(2G_o²) ≫ λ,
 * |β|² ≫ κ and G_o⁴κ ≫ λ hold with a factor-10 margin.
 */
AsymptoticEstimate asymptotic_tracking_mse(const ProcessParams& p, double photon_flux);
/// ξ ≈ (κ/(2|β|²))^{2/3}, same regime checks.
AsymptoticEstimate asymptotic_smoothing_mse(const ProcessParams& p, double photon_flux);

struct ReferenceBounds {
    double classical = 0.0;   ///< (1/2)√(κ/|β|²), MZI smoothing limit
    double canonical = 0.0;   ///< (4/5)(κ/|β|²)^{2/3}
    double heisenberg = 0.0;  ///< (κ/(2|β|²))^{2/3}
};

ReferenceBounds reference_bounds(const ProcessParams& p, double photon_flux);

/// One point of the flux-scaling curve, with the gain re-optimized.
struct ScalingPoint {
    double photon_flux = 0.0;
    double optimal_gain_sq = 0.0;
    double tracking_mse = 0.0;
    double smoothing_mse = 0.0;
    double mzi_smoothing_mse = 0.0;
    ReferenceBounds references;
};

ScalingPoint scaling_point(const ProcessParams& p, double photon_flux,
                           const GainSearchOptions& options = {});

}  // namespace phasetrack
