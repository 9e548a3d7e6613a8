// SU(1,1) (NLI) and Mach-Zehnder input-output relations, homodyne
// statistics and the linearized photocurrent models fed to the filter.
#pragma once

#include <string_view>

namespace phasetrack {

enum class InstrumentKind { nli, mzi };

std::string_view to_string(InstrumentKind kind);

/**
 * @brief Instrument and resource description
 *
 * gain_sq is G² of the parametric amplifiers (NLI only, G² - g² = 1) and
 * photon_flux is |β|², the mean photon number per second inside the
 * interferometer. For the NLI |β|² = (G² + g²)|α|².
 */
class InterferometerConfig {
public:
    /// Throws std::invalid_argument unless gain_sq > 1 and photon_flux > 0.
    static InterferometerConfig nli(double gain_sq, double photon_flux);
    /// Throws std::invalid_argument unless photon_flux > 0.
    static InterferometerConfig mzi(double photon_flux);

    InstrumentKind kind() const { return kind_; }
    double photon_flux() const { return photon_flux_; }

    // NLI quantities. For an MZI gain_sq() is 1 and the others are unused.
    double gain_sq() const { return gain_sq_; }
    double g_sq() const { return gain_sq_ - 1.0; }
    /// G²g²
    double gain_product() const { return gain_sq_ * (gain_sq_ - 1.0); }
    /// |α|² = |β|²/(G²+g²) for NLI, |β|² for MZI.
    double seed_intensity() const;

private:
    InterferometerConfig(InstrumentKind kind, double gain_sq, double photon_flux)
        : kind_(kind), gain_sq_(gain_sq), photon_flux_(photon_flux) {}

    InstrumentKind kind_;
    double gain_sq_;
    double photon_flux_;
};

/**
 * Linearized photocurrent r(t) = signal_gain·φ(t) + √noise_power·n(t),
 * ⟨n(t)n(s)⟩ = δ(t-s).
 */
struct PhotocurrentModel {
    InstrumentKind kind = InstrumentKind::mzi;
    double signal_gain = 0.0;  ///< [√(1/s)]
    double noise_power = 1.0;  ///< N, dimensionless, >= 1
    double sigma_f_sq = 0.0;   ///< tracking MSE entering N [rad²]
    double photon_flux = 0.0;  ///< |β|² this model was built from

    /// P = signal_gain²
    double signal_power() const { return signal_gain * signal_gain; }
    /// SNR = P/N [1/s]
    double snr() const { return signal_power() / noise_power; }
    /// Signal gain is numerically negligible (G² -> 1⁺).
    bool is_degenerate() const { return signal_power() < 1e-12 * photon_flux; }
};

PhotocurrentModel build_photocurrent_model(const InterferometerConfig& config, double sigma_f_sq);

/// ⟨X_dout(θ)⟩ for arbitrary arm phase Φ and local-oscillator phase θ.
double nli_homodyne_mean(const InterferometerConfig& config, double phi, double arm_phase,
                         double lo_phase);
/// Δ²X_dout(θ) = 4G²g²(1 + cos(Φ + φ)) + 1
double nli_homodyne_variance(const InterferometerConfig& config, double phi, double arm_phase);

/**
 * Homodyne mean under the adaptive convention Φ = -φ_f - π, θ = φ_f + π/2.
 * Exactly 2Gg|α|·sin(φ - φ_f); the linear model keeps 2Gg|α|·(φ - φ_f).
 */
double nli_output_mode_mean(const InterferometerConfig& config, double phi, double phi_feedback);
/// 8G²g²·sin²((φ - φ_f)/2) + 1 under the same convention.
double nli_output_mode_variance(const InterferometerConfig& config, double phi,
                                double phi_feedback);

/// MZI with Φ = φ_f, θ = φ_f + π: |β|·sin(φ - φ_f); variance is 1 (coherent probe).
double mzi_output_mode_mean(const InterferometerConfig& config, double phi, double phi_feedback);
double mzi_output_mode_variance(const InterferometerConfig& config, double phi,
                                double phi_feedback);

/**
 * SNR_NLI / SNR_MZI at equal photon flux:
 *   4G²(G²-1) / ((2G²-1)(2G²(G²-1)σ_f² + 1))
 * Requires gain_sq >= 1 and sigma_f_sq >= 0.
 */
double snr_ratio(double gain_sq, double sigma_f_sq);

}  // namespace phasetrack
