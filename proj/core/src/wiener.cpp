#include "phasetrack/wiener.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace phasetrack {

ObservationSpectrum::ObservationSpectrum(double signal_power, double noise_level,
                                         ProcessParams process)
    : signal_power_(signal_power), noise_level_(noise_level), process_(process) {
    if (!(signal_power >= 0.0) || !std::isfinite(signal_power)) {
        throw std::invalid_argument("ObservationSpectrum: signal power must be >= 0");
    }
    if (!(noise_level > 0.0) || !std::isfinite(noise_level)) {
        throw std::invalid_argument("ObservationSpectrum: noise level must be > 0");
    }
    const double lam = process_.lambda();
    information_ = signal_power_ * process_.kappa() / (noise_level_ * lam * lam);
}

double ObservationSpectrum::root() const { return std::sqrt(1.0 + information_); }

double ObservationSpectrum::density(double omega) const {
    return signal_power_ * spectral_density(process_, omega) + noise_level_;
}

ObservationSpectrum observation_spectrum(const PhotocurrentModel& model,
                                         const ProcessParams& process) {
    return ObservationSpectrum(model.signal_power(), model.noise_power, process);
}

Complex SpectralFactor::response(double omega) const {
    const Complex iw(0.0, omega);
    return scale * (iw + zero) / (iw + pole);
}

Complex SpectralFactor::whitening(double omega) const { return 1.0 / response(omega); }

SpectralFactor factorize(const ObservationSpectrum& obs) {
    return SpectralFactor{std::sqrt(obs.noise_level()), obs.cutoff(), obs.process().lambda()};
}

double cross_correlation_kdz(const ObservationSpectrum& obs, double epsilon, double tau) {
    const double lam = obs.process().lambda();
    const double c = std::sqrt(obs.signal_power()) * obs.process().kappa() /
                     (std::sqrt(obs.noise_level()) * lam * (1.0 + obs.root()));
    const double x = tau + epsilon;
    return x >= 0.0 ? c * std::exp(-lam * x) : c * std::exp(obs.cutoff() * x);
}

EstimationMode mode_for_offset(double epsilon) {
    if (epsilon > 0.0) return EstimationMode::prediction;
    if (epsilon < 0.0) return EstimationMode::smoothing;
    return EstimationMode::tracking;
}

const char* to_string(EstimationMode mode) {
    switch (mode) {
        case EstimationMode::prediction: return "prediction";
        case EstimationMode::tracking: return "tracking";
        case EstimationMode::smoothing: return "smoothing";
    }
    return "?";
}

WienerSolution::WienerSolution(const ObservationSpectrum& obs, double epsilon)
    : obs_(obs), epsilon_(epsilon), mode_(mode_for_offset(epsilon)), cutoff_(obs.cutoff()) {
    if (!std::isfinite(epsilon)) throw std::invalid_argument("WienerSolution: epsilon must be finite");
    const double lam = obs.process().lambda();
    const double kap = obs.process().kappa();
    const double s = obs.root();
    const double num = kap * std::sqrt(obs.signal_power()) / obs.noise_level();
    chi_ = num / (lam * (1.0 + s));
    smooth_scale_ = num / (2.0 * lam * s);
    rho_ = (s - 1.0) / (s + 1.0);
}

Complex WienerSolution::response(double omega) const {
    const Complex iw(0.0, omega);
    const double lam = obs_.process().lambda();
    const Complex tracking = chi_ / (cutoff_ + iw);
    switch (mode_) {
        case EstimationMode::tracking: return tracking;
        case EstimationMode::prediction: return std::exp(-lam * epsilon_) * tracking;
        case EstimationMode::smoothing: {
            const double s = obs_.root();
            const double num = obs_.process().kappa() * std::sqrt(obs_.signal_power()) /
                               obs_.noise_level();
            const Complex delay = std::exp(iw * epsilon_);
            const Complex bracket =
                1.0 - std::exp(epsilon_ * (cutoff_ - iw)) * (lam + iw) / (lam * (1.0 + s));
            return num * delay / (lam * lam * (1.0 + obs_.information()) + omega * omega) * bracket;
        }
    }
    return {};
}

Complex WienerSolution::advance_form_response(double omega) const {
    const Complex iw(0.0, omega);
    return std::exp(iw * epsilon_) * chi_ / (cutoff_ + iw);
}

double WienerSolution::impulse_response(double t) const {
    if (t < 0.0) return 0.0;
    const double lam = obs_.process().lambda();
    switch (mode_) {
        case EstimationMode::tracking: return chi_ * std::exp(-cutoff_ * t);
        case EstimationMode::prediction:
            return std::exp(-lam * epsilon_) * chi_ * std::exp(-cutoff_ * t);
        case EstimationMode::smoothing: {
            const double lag = -epsilon_;
            return smooth_scale_ * (std::exp(-cutoff_ * std::abs(t - lag)) +
                                    rho_ * std::exp(-cutoff_ * (lag + t)));
        }
    }
    return 0.0;
}

double WienerSolution::absolute_area() const { return tail_area(0.0); }

double WienerSolution::tail_area(double horizon) const {
    const double c = cutoff_;
    const double h = std::max(horizon, 0.0);
    switch (mode_) {
        case EstimationMode::tracking: return chi_ / c * std::exp(-c * h);
        case EstimationMode::prediction:
            return std::exp(-obs_.process().lambda() * epsilon_) * chi_ / c * std::exp(-c * h);
        case EstimationMode::smoothing: {
            const double lag = -epsilon_;
            // ∫_h^∞ e^{-c|t-L|} dt
            const double two_sided = h < lag ? (1.0 - std::exp(-c * (lag - h))) / c + 1.0 / c
                                             : std::exp(-c * (h - lag)) / c;
            const double correction = rho_ * std::exp(-c * (lag + h)) / c;
            return smooth_scale_ * (two_sided + correction);
        }
    }
    return 0.0;
}

double WienerSolution::default_horizon() const {
    const double base = std::max(40.0 / obs_.process().lambda(), 40.0 / cutoff_);
    return mode_ == EstimationMode::smoothing ? base - epsilon_ : base;
}

WienerSolution synthesize(const ObservationSpectrum& obs, double epsilon) {
    return WienerSolution(obs, epsilon);
}

double SampledKernel::dc_gain() const {
    double sum = 0.0;
    for (double v : taps) sum += v;
    return sum * dt;
}

namespace {

// ∫_a^b e^{-c|t-L|} dt for 0 <= a < b
double two_sided_bin(double c, double lag, double a, double b) {
    auto primitive = [&](double t) {
        // F(t) = ∫_0^t e^{-c|s-L|} ds
        if (t <= lag) return (std::exp(-c * (lag - t)) - std::exp(-c * lag)) / c;
        return (1.0 - std::exp(-c * lag)) / c - std::expm1(-c * (t - lag)) / c;
    };
    return primitive(b) - primitive(a);
}

}  // namespace

SampledKernel realize_impulse_response(const WienerSolution& sol, double dt, double horizon,
                                       double tail_tolerance) {
    if (!(dt > 0.0)) throw std::invalid_argument("realize_impulse_response: dt must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("realize_impulse_response: horizon must be > 0");

    const auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    const double covered = static_cast<double>(n) * dt;
    const double tail = sol.tail_area(covered) / sol.absolute_area();
    if (tail > tail_tolerance) {
        throw std::invalid_argument("realize_impulse_response: horizon too short, tail fraction " +
                                    std::to_string(tail) + " exceeds " +
                                    std::to_string(tail_tolerance));
    }

    SampledKernel k;
    k.dt = dt;
    k.tail_fraction = tail;
    k.taps.resize(n);
    const double c = sol.cutoff();
    const double bin = -std::expm1(-c * dt) / c;  // ∫_0^dt e^{-ct}
    if (sol.mode() != EstimationMode::smoothing) {
        const double head = sol.impulse_response(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            k.taps[i] = head * std::exp(-c * static_cast<double>(i) * dt) * bin / dt;
        }
        return k;
    }

    // Split h_os back into its pieces to integrate exactly over each bin.
    const double lag = -sol.epsilon();
    const double rho = sol.smoothing_reflection();
    const double scale = sol.smoothing_scale();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) * dt;
        const double corr = rho * std::exp(-c * (lag + a)) * bin;
        k.taps[i] = scale * (two_sided_bin(c, lag, a, a + dt) + corr) / dt;
    }
    return k;
}

OffsetEstimator::OffsetEstimator(const WienerSolution& sol, double dt) : dt_(dt), mode_(sol.mode()) {
    if (!(dt > 0.0)) throw std::invalid_argument("OffsetEstimator: dt must be > 0");
    lag_ = std::lround(sol.epsilon() / dt);
    if (mode_ != EstimationMode::tracking && lag_ == 0) mode_ = EstimationMode::tracking;
    const double c = sol.cutoff();
    decay_ = std::exp(-c * dt);
    weight_ = -std::expm1(-c * dt) / c;

    // Rebuild the realized solution at the grid-aligned ε.
    const WienerSolution aligned(sol.spectrum(), static_cast<double>(lag_) * dt);
    const double chi = aligned.tracking_gain();
    const double lam = sol.spectrum().process().lambda();
    switch (mode_) {
        case EstimationMode::tracking:
            forward_scale_ = chi;
            window_scale_ = tail_scale_ = 0.0;
            break;
        case EstimationMode::prediction:
            forward_scale_ = std::exp(-lam * aligned.epsilon()) * chi;
            window_scale_ = tail_scale_ = 0.0;
            break;
        case EstimationMode::smoothing: {
            const double k = aligned.smoothing_scale();
            forward_scale_ = k;
            window_scale_ = k;
            tail_scale_ = k * aligned.smoothing_reflection() * std::exp(c * aligned.epsilon());
            break;
        }
    }
}

std::vector<double> OffsetEstimator::apply(const std::vector<double>& record) const {
    const std::size_t n = record.size();
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());

    // forward[i] = Σ_{j<i} b^{i-1-j} w r_j
    std::vector<double> forward(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) forward[i + 1] = decay_ * forward[i] + weight_ * record[i];

    if (mode_ != EstimationMode::smoothing) {
        for (std::size_t i = 0; i < n; ++i) out[i] = forward_scale_ * forward[i];
        return out;
    }

    // backward[i] = Σ_{j>=i} b^{j-i} w r_j; window sum over [i, i+m) is
    // backward[i] - b^m backward[i+m].
    std::vector<double> backward(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) backward[i] = decay_ * backward[i + 1] + weight_ * record[i];
    const auto m = static_cast<std::size_t>(-lag_);
    const double bm = std::pow(decay_, static_cast<double>(m));
    for (std::size_t i = m; i < n; ++i) {
        const std::size_t u = i - m;
        const double window = backward[u] - bm * backward[i];
        out[i] = forward_scale_ * forward[u] + window_scale_ * window + tail_scale_ * forward[i];
    }
    return out;
}

}  // namespace phasetrack
