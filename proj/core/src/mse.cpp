#include "phasetrack/mse.hpp"

#include <cmath>
#include <stdexcept>

namespace phasetrack {

double tracking_mse_nli(const InterferometerConfig& config, const ProcessParams& p) {
    if (config.kind() != InstrumentKind::nli) {
        throw std::invalid_argument("tracking_mse_nli requires an NLI configuration");
    }
    const double gg = config.gain_product();
    const double kap = p.kappa();
    const double lam = p.lambda();
    const double a = lam - gg * kap;
    const double b = config.seed_intensity() + lam;
    const double q = 4.0 * gg * b * kap;
    const double root = std::sqrt(a * a + q);
    // Rationalized form when a > 0 avoids cancellation in -a + root.
    if (a > 0.0) return kap / (a + root);
    return (root - a) / (4.0 * gg * b);
}

double tracking_mse_for_information(const ProcessParams& p, double information) {
    return p.kappa() / p.lambda() / (1.0 + std::sqrt(1.0 + information));
}

double tracking_mse_mzi(const InterferometerConfig& config, const ProcessParams& p) {
    if (config.kind() != InstrumentKind::mzi) {
        throw std::invalid_argument("tracking_mse_mzi requires an MZI configuration");
    }
    const double info = config.photon_flux() * p.kappa() / (p.lambda() * p.lambda());
    return tracking_mse_for_information(p, info);
}

double tracking_mse(const InterferometerConfig& config, const ProcessParams& p) {
    return config.kind() == InstrumentKind::nli ? tracking_mse_nli(config, p)
                                                : tracking_mse_mzi(config, p);
}

PhotocurrentModel photocurrent_model(const InterferometerConfig& config, const ProcessParams& p) {
    return build_photocurrent_model(config, tracking_mse(config, p));
}

ObservationSpectrum observation_spectrum(const InterferometerConfig& config,
                                         const ProcessParams& p) {
    return observation_spectrum(photocurrent_model(config, p), p);
}

double offset_mse_for_information(const ProcessParams& p, double information, double epsilon) {
    const double prior = p.stationary_variance();
    const double s = std::sqrt(1.0 + information);
    const double weight = information / ((1.0 + s) * (1.0 + s));
    if (epsilon > 0.0) {
        return prior * (1.0 - weight * std::exp(-2.0 * p.lambda() * epsilon));
    }
    if (epsilon < 0.0) {
        return prior * (1.0 / s + weight * std::exp(2.0 * p.lambda() * s * epsilon) / s);
    }
    return tracking_mse_for_information(p, information);
}

double information_integral(const ObservationSpectrum& obs, double epsilon) {
    const double lam = obs.process().lambda();
    const double kap = obs.process().kappa();
    const double s = obs.root();
    const double c2 = obs.signal_power() * kap * kap /
                      (obs.noise_level() * lam * lam * (1.0 + s) * (1.0 + s));
    if (epsilon >= 0.0) return c2 * std::exp(-2.0 * lam * epsilon) / (2.0 * lam);
    const double cut = obs.cutoff();
    return c2 * (-std::expm1(2.0 * cut * epsilon) / (2.0 * cut) + 1.0 / (2.0 * lam));
}

MseBreakdown offset_mse(const InterferometerConfig& config, const ProcessParams& p, double epsilon) {
    if (!std::isfinite(epsilon)) throw std::invalid_argument("offset_mse: epsilon must be finite");
    const PhotocurrentModel model = photocurrent_model(config, p);
    const ObservationSpectrum obs = observation_spectrum(model, p);

    MseBreakdown out;
    out.mode = mode_for_offset(epsilon);
    out.epsilon = epsilon;
    out.information = obs.information();
    out.sigma_f_sq = model.sigma_f_sq;
    out.prior_variance = p.stationary_variance();
    out.information_integral = information_integral(obs, epsilon);
    out.xi = epsilon == 0.0 ? model.sigma_f_sq
                            : offset_mse_for_information(p, obs.information(), epsilon);
    return out;
}

double smoothing_floor_mse(const InterferometerConfig& config, const ProcessParams& p) {
    const ObservationSpectrum obs = observation_spectrum(config, p);
    return p.stationary_variance() / obs.root();
}

FixedPointResult tracking_mse_fixed_point(const InterferometerConfig& config,
                                          const ProcessParams& p, double damping,
                                          double tolerance, int max_iterations) {
    if (config.kind() != InstrumentKind::nli) {
        throw std::invalid_argument("tracking_mse_fixed_point requires an NLI configuration");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw std::invalid_argument("tracking_mse_fixed_point: damping must be in (0, 1]");
    }
    FixedPointResult r;
    double x = p.stationary_variance();
    for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
        const PhotocurrentModel model = build_photocurrent_model(config, x);
        const double info = observation_spectrum(model, p).information();
        const double next = (1.0 - damping) * x + damping * tracking_mse_for_information(p, info);
        const double step = std::abs(next - x);
        x = next;
        if (step <= tolerance * x) {
            r.converged = true;
            break;
        }
    }
    r.value = x;
    return r;
}

}  // namespace phasetrack
