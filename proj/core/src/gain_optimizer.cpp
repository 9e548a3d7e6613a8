#include "phasetrack/gain_optimizer.hpp"

#include "phasetrack/interferometer.hpp"
#include "phasetrack/mse.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace phasetrack {

const char* to_string(GainObjective objective) {
    return objective == GainObjective::tracking ? "tracking" : "smoothing_floor";
}

namespace {

void check_flux(double photon_flux) {
    if (!(photon_flux > 0.0) || !std::isfinite(photon_flux)) {
        throw std::invalid_argument("photon_flux must be > 0");
    }
}

double objective_value(const ProcessParams& p, double photon_flux, GainObjective objective,
                       double gain_sq) {
    const auto config = InterferometerConfig::nli(gain_sq, photon_flux);
    return objective == GainObjective::tracking ? tracking_mse_nli(config, p)
                                                : smoothing_floor_mse(config, p);
}

// Scan over log(g²); index 0 is the smallest admissible gain.
std::vector<double> gain_grid(const GainSearchOptions& o) {
    const double lo = std::log(1e-3);
    const double hi = std::log(o.max_gain_sq - 1.0);
    std::vector<double> g(static_cast<std::size_t>(o.grid_points));
    for (int i = 0; i < o.grid_points; ++i) {
        g[static_cast<std::size_t>(i)] = 1.0 + std::exp(lo + (hi - lo) * i / (o.grid_points - 1));
    }
    return g;
}

}  // namespace

GainOptimum optimize_gain(const ProcessParams& p, double photon_flux, GainObjective objective,
                          const GainSearchOptions& options) {
    check_flux(photon_flux);
    if (options.grid_points < 3 || !(options.max_gain_sq > 1.0) || !(options.tolerance > 0.0)) {
        throw std::invalid_argument("optimize_gain: invalid search options");
    }

    GainOptimum out;
    auto f = [&](double g2) {
        ++out.evaluations;
        return objective_value(p, photon_flux, objective, g2);
    };

    const std::vector<double> grid = gain_grid(options);
    std::vector<double> values(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = f(grid[i]);
        if (values[i] < values[best]) best = i;  // strict: ties stay at smaller G²
    }
    double vmax = values[0];
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax - values[best] <= 1e-14 * std::abs(values[best])) {
        out.flat = true;
        out.gain_sq = grid[best];
        out.mse = values[best];
        return out;
    }

    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > options.tolerance) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    out.gain_sq = 0.5 * (a + b);
    out.mse = f(out.gain_sq);
    if (values[best] < out.mse) {
        out.gain_sq = grid[best];
        out.mse = values[best];
    }
    return out;
}

double snr_optimal_gain(const ProcessParams& p, double photon_flux,
                        const GainSearchOptions& options) {
    check_flux(photon_flux);
    auto residual = [&](double g2) {
        const double a = g2 * (g2 - 1.0);
        const double stationary = 4.0 * (2.0 * a + 1.0) / (16.0 * a * a);
        return tracking_mse_nli(InterferometerConfig::nli(g2, photon_flux), p) - stationary;
    };
    // Residual is negative as G² -> 1⁺ (stationary term diverges) and
    // positive at large gain; bracket on the scan grid.
    const std::vector<double> grid = gain_grid(options);
    double prev = grid.front();
    double prev_r = residual(prev);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double r = residual(grid[i]);
        if ((prev_r < 0.0) != (r < 0.0)) {
            std::uintmax_t iters = 200;
            auto tol = boost::math::tools::eps_tolerance<double>(40);
            const auto [lo, hi] =
                boost::math::tools::toms748_solve(residual, prev, grid[i], prev_r, r, tol, iters);
            return 0.5 * (lo + hi);
        }
        prev = grid[i];
        prev_r = r;
    }
    throw std::runtime_error("snr_optimal_gain: no stationary point in the search range");
}

double asymptotic_optimal_gain(const ProcessParams& p, double photon_flux) {
    check_flux(photon_flux);
    const double k = p.kappa();
    return std::cbrt(photon_flux * k * k) / (std::cbrt(4.0) * k);
}

namespace {

std::vector<std::string> regime_warnings(const ProcessParams& p, double photon_flux, double g2) {
    std::vector<std::string> w;
    constexpr double margin = 10.0;
    if (g2 < margin) w.emplace_back("G_o^2 >> 1 violated");
    if (photon_flux / (2.0 * g2) < margin * p.lambda()) w.emplace_back("|beta|^2/(2 G_o^2) >> lambda violated");
    if (photon_flux < margin * p.kappa()) w.emplace_back("|beta|^2 >> kappa violated");
    if (g2 * g2 * p.kappa() < margin * p.lambda()) w.emplace_back("G_o^4 kappa >> lambda violated");
    return w;
}

}  // namespace

AsymptoticEstimate asymptotic_tracking_mse(const ProcessParams& p, double photon_flux) {
    AsymptoticEstimate e;
    e.gain_sq = asymptotic_optimal_gain(p, photon_flux);
    e.mse = std::cbrt(2.0) * std::pow(p.kappa() / photon_flux, 2.0 / 3.0);
    e.consistency = 1.0 / (2.0 * e.gain_sq * e.gain_sq);
    e.warnings = regime_warnings(p, photon_flux, e.gain_sq);
    return e;
}

AsymptoticEstimate asymptotic_smoothing_mse(const ProcessParams& p, double photon_flux) {
    AsymptoticEstimate e;
    e.gain_sq = asymptotic_optimal_gain(p, photon_flux);
    e.mse = std::pow(p.kappa() / (2.0 * photon_flux), 2.0 / 3.0);
    e.consistency = e.mse;
    e.warnings = regime_warnings(p, photon_flux, e.gain_sq);
    return e;
}

ReferenceBounds reference_bounds(const ProcessParams& p, double photon_flux) {
    check_flux(photon_flux);
    const double r = p.kappa() / photon_flux;
    return {0.5 * std::sqrt(r), 0.8 * std::pow(r, 2.0 / 3.0), std::pow(r / 2.0, 2.0 / 3.0)};
}

ScalingPoint scaling_point(const ProcessParams& p, double photon_flux,
                           const GainSearchOptions& options) {
    ScalingPoint s;
    s.photon_flux = photon_flux;
    const GainOptimum best = optimize_gain(p, photon_flux, GainObjective::smoothing_floor, options);
    s.optimal_gain_sq = best.gain_sq;
    s.smoothing_mse = best.mse;
    s.tracking_mse = tracking_mse_nli(InterferometerConfig::nli(best.gain_sq, photon_flux), p);
    s.mzi_smoothing_mse = smoothing_floor_mse(InterferometerConfig::mzi(photon_flux), p);
    s.references = reference_bounds(p, photon_flux);
    return s;
}

}  // namespace phasetrack
