#include "phasetrack/interferometer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phasetrack {

std::string_view to_string(InstrumentKind kind) {
    return kind == InstrumentKind::nli ? "nli" : "mzi";
}

InterferometerConfig InterferometerConfig::nli(double gain_sq, double photon_flux) {
    if (!(gain_sq > 1.0) || !std::isfinite(gain_sq)) {
        throw std::invalid_argument("NLI gain_sq must be > 1 (g² = G² - 1 > 0), got " +
                                    std::to_string(gain_sq));
    }
    if (!(photon_flux > 0.0) || !std::isfinite(photon_flux)) {
        throw std::invalid_argument("photon_flux must be > 0, got " + std::to_string(photon_flux));
    }
    return {InstrumentKind::nli, gain_sq, photon_flux};
}

InterferometerConfig InterferometerConfig::mzi(double photon_flux) {
    if (!(photon_flux > 0.0) || !std::isfinite(photon_flux)) {
        throw std::invalid_argument("photon_flux must be > 0, got " + std::to_string(photon_flux));
    }
    return {InstrumentKind::mzi, 1.0, photon_flux};
}

double InterferometerConfig::seed_intensity() const {
    if (kind_ == InstrumentKind::mzi) return photon_flux_;
    return photon_flux_ / (2.0 * gain_sq_ - 1.0);
}

PhotocurrentModel build_photocurrent_model(const InterferometerConfig& config, double sigma_f_sq) {
    if (!(sigma_f_sq >= 0.0)) {
        throw std::invalid_argument("build_photocurrent_model: sigma_f_sq must be >= 0");
    }
    PhotocurrentModel m;
    m.kind = config.kind();
    m.sigma_f_sq = sigma_f_sq;
    m.photon_flux = config.photon_flux();
    if (config.kind() == InstrumentKind::mzi) {
        m.signal_gain = std::sqrt(config.photon_flux());
        m.noise_power = 1.0;
    } else {
        // 2Gg|β|/√(G²+g²) = 2Gg|α|
        m.signal_gain = 2.0 * std::sqrt(config.gain_product() * config.seed_intensity());
        m.noise_power = 2.0 * config.gain_product() * sigma_f_sq + 1.0;
    }
    return m;
}

namespace {

void require_nli(const InterferometerConfig& config, const char* what) {
    if (config.kind() != InstrumentKind::nli) {
        throw std::invalid_argument(std::string(what) + " requires an NLI configuration");
    }
}

void require_mzi(const InterferometerConfig& config, const char* what) {
    if (config.kind() != InstrumentKind::mzi) {
        throw std::invalid_argument(std::string(what) + " requires an MZI configuration");
    }
}

}  // namespace

double nli_homodyne_mean(const InterferometerConfig& config, double phi, double arm_phase,
                         double lo_phase) {
    require_nli(config, "nli_homodyne_mean");
    const double gg = std::sqrt(config.gain_product());
    const double alpha = std::sqrt(config.seed_intensity());
    return 4.0 * gg * std::cos((arm_phase + phi) / 2.0) *
           std::cos((arm_phase - phi) / 2.0 + lo_phase) * alpha;
}

double nli_homodyne_variance(const InterferometerConfig& config, double phi, double arm_phase) {
    require_nli(config, "nli_homodyne_variance");
    return 4.0 * config.gain_product() * (1.0 + std::cos(arm_phase + phi)) + 1.0;
}

double nli_output_mode_mean(const InterferometerConfig& config, double phi, double phi_feedback) {
    require_nli(config, "nli_output_mode_mean");
    // The two-cosine product collapses to 2Gg|α|·sin(φ - φ_f) at
    // Φ = -φ_f - π, θ = φ_f + π/2; evaluate the collapsed form so the
    // result stays accurate for small offsets.
    const double gg = std::sqrt(config.gain_product());
    const double alpha = std::sqrt(config.seed_intensity());
    return 2.0 * gg * alpha * std::sin(phi - phi_feedback);
}

double nli_output_mode_variance(const InterferometerConfig& config, double phi,
                                double phi_feedback) {
    require_nli(config, "nli_output_mode_variance");
    const double s = std::sin((phi - phi_feedback) / 2.0);
    return 8.0 * config.gain_product() * s * s + 1.0;
}

double mzi_output_mode_mean(const InterferometerConfig& config, double phi, double phi_feedback) {
    require_mzi(config, "mzi_output_mode_mean");
    return std::sqrt(config.photon_flux()) * std::sin(phi - phi_feedback);
}

double mzi_output_mode_variance(const InterferometerConfig& config, double, double) {
    require_mzi(config, "mzi_output_mode_variance");
    return 1.0;
}

double snr_ratio(double gain_sq, double sigma_f_sq) {
    if (!(gain_sq >= 1.0)) throw std::invalid_argument("snr_ratio: gain_sq must be >= 1");
    if (!(sigma_f_sq >= 0.0)) throw std::invalid_argument("snr_ratio: sigma_f_sq must be >= 0");
    const double a = gain_sq * (gain_sq - 1.0);
    return 4.0 * a / ((2.0 * gain_sq - 1.0) * (2.0 * a * sigma_f_sq + 1.0));
}

}  // namespace phasetrack
