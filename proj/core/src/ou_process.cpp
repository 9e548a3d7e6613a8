#include "phasetrack/ou_process.hpp"

#include "rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phasetrack {

ProcessParams::ProcessParams(double kappa, double lambda) : kappa_(kappa), lambda_(lambda) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("ProcessParams: kappa must be > 0, got " + std::to_string(kappa));
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ProcessParams: lambda must be > 0, got " + std::to_string(lambda));
    }
}

double stationary_variance(const ProcessParams& p) { return p.stationary_variance(); }

double autocorrelation(const ProcessParams& p, double tau) {
    return p.stationary_variance() * std::exp(-p.lambda() * std::abs(tau));
}

double spectral_density(const ProcessParams& p, double omega) {
    return p.kappa() / (omega * omega + p.lambda() * p.lambda());
}

namespace {

// Σ_{k≥k0} coeff(k)·x^k / k!, for the small-x branches below.
template <typename Coeff>
double exp_series(double x, int k0, Coeff coeff) {
    double term = 1.0;
    for (int k = 1; k < k0; ++k) term *= x / k;
    double sum = 0.0;
    for (int k = k0; k < k0 + 30; ++k) {
        term *= x / k;
        const double add = coeff(k) * term;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

OuStepMoments ou_step_moments(const ProcessParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ou_step_moments: dt must be > 0");
    const double lam = p.lambda();
    const double kap = p.kappa();
    const double x = lam * dt;

    OuStepMoments m;
    m.decay = std::exp(-x);
    const double one_minus_a = -std::expm1(-x);
    m.integral_gain = one_minus_a / lam;
    m.var_w = kap / (2.0 * lam) * -std::expm1(-2.0 * x);

    // cov_wu = κ/λ² [(1-e^{-x}) - (1-e^{-2x})/2]
    // var_u  = κ/λ³ [x - 2(1-e^{-x}) + (1-e^{-2x})/2]
    double cov_bracket;
    double var_bracket;
    if (x < 0.5) {
        cov_bracket = exp_series(x, 2, [](int k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            return sign * (std::ldexp(1.0, k - 1) - 1.0);
        });
        var_bracket = exp_series(x, 3, [](int k) {
            const double sign = (k % 2 == 0) ? -1.0 : 1.0;
            return sign * (std::ldexp(1.0, k - 1) - 2.0);
        });
    } else {
        const double half_two = -std::expm1(-2.0 * x) / 2.0;
        cov_bracket = one_minus_a - half_two;
        var_bracket = x - 2.0 * one_minus_a + half_two;
    }
    m.cov_wu = kap / (lam * lam) * cov_bracket;
    m.var_u = kap / (lam * lam * lam) * var_bracket;
    return m;
}

PhasePath sample_path(const ProcessParams& p, double dt, std::size_t n, std::uint64_t seed,
                      Discretization scheme, std::uint64_t stream, std::optional<double> initial) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be > 0");
    if (n == 0) throw std::invalid_argument("sample_path: n must be >= 1");
    if (p.lambda() * dt > kMaxLambdaDt) {
        throw std::invalid_argument("sample_path: lambda*dt = " + std::to_string(p.lambda() * dt) +
                                    " exceeds 0.1, discretization too coarse");
    }

    detail::NormalStream normal(seed, stream);
    PhasePath path{dt, {}, seed};
    path.samples.resize(n);

    double a = 0.0;
    double s = 0.0;
    if (scheme == Discretization::exact) {
        a = std::exp(-p.lambda() * dt);
        s = std::sqrt(p.stationary_variance() * -std::expm1(-2.0 * p.lambda() * dt));
    } else {
        a = 1.0 - p.lambda() * dt;
        s = std::sqrt(p.kappa() * dt);
    }

    double phi = initial ? *initial : std::sqrt(p.stationary_variance()) * normal();
    path.samples[0] = phi;
    for (std::size_t i = 1; i < n; ++i) {
        phi = a * phi + s * normal();
        path.samples[i] = phi;
    }
    return path;
}

}  // namespace phasetrack
