#include "phasetrack/ou_process.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace phasetrack;

namespace {
const ProcessParams kBaseline{1e4, 1e5};
}

TEST(ProcessParams, RejectsNonPositiveRates) {
    EXPECT_THROW(ProcessParams(0.0, 1e5), std::invalid_argument);
    EXPECT_THROW(ProcessParams(1e4, -1.0), std::invalid_argument);
    EXPECT_THROW(ProcessParams(NAN, 1.0), std::invalid_argument);
}

TEST(OuProcess, StationaryVarianceAndCorrelation) {
    EXPECT_DOUBLE_EQ(stationary_variance(kBaseline), 0.05);
    EXPECT_NEAR(autocorrelation(kBaseline, 1e-5), 0.05 * std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(autocorrelation(kBaseline, -2e-5), autocorrelation(kBaseline, 2e-5));
    EXPECT_DOUBLE_EQ(spectral_density(kBaseline, 0.0), 1e-6);
}

TEST(OuProcess, SpectrumIntegratesToCorrelation) {
    // (1/π)∫₀^∞ S(ω) cos(ωτ) dω = K(τ), checked at τ = 0 by quadrature.
    boost::math::quadrature::exp_sinh<double> integrator;
    const double area = integrator.integrate([](double w) { return spectral_density(kBaseline, w); });
    EXPECT_NEAR(area / std::numbers::pi, stationary_variance(kBaseline), 1e-9);
}

TEST(OuProcess, SamplePathIsReproducible) {
    const auto a = sample_path(kBaseline, 1e-7, 1000, 42);
    const auto b = sample_path(kBaseline, 1e-7, 1000, 42);
    const auto c = sample_path(kBaseline, 1e-7, 1000, 43);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, c.samples);
    EXPECT_EQ(a.seed, 42u);
}

TEST(OuProcess, SamplePathValidation) {
    EXPECT_THROW(sample_path(kBaseline, 0.0, 10, 1), std::invalid_argument);
    EXPECT_THROW(sample_path(kBaseline, 1e-7, 0, 1), std::invalid_argument);
    EXPECT_THROW(sample_path(kBaseline, 2e-6, 10, 1), std::invalid_argument);  // λdt = 0.2
}

TEST(OuProcess, NearlyNoiselessPathDecays) {
    const ProcessParams quiet{1e-30, 1e5};
    const auto path = sample_path(quiet, 1e-7, 1001, 7, Discretization::exact, 0, 1.0);
    EXPECT_NEAR(path.samples.back(), std::exp(-1e5 * 1e-4), 1e-12);
}

TEST(OuProcess, EmpiricalMomentsMatch) {
    const double dt = 1e-6;
    const auto path = sample_path(kBaseline, dt, 2'000'000, 11);
    const auto& x = path.samples;
    const double n = static_cast<double>(x.size());
    const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / n;
    double lag = 0.0;
    for (std::size_t i = 0; i + 10 < x.size(); ++i) lag += x[i] * x[i + 10];
    lag /= n - 10;
    // 2e6 samples at λdt = 0.1: about 1e5 correlation times, so ~0.5% noise.
    EXPECT_NEAR(var, 0.05, 0.05 * 0.025);
    EXPECT_NEAR(lag / var, std::exp(-1.0), 0.02);
}

TEST(OuProcess, EulerMaruyamaBiasIsFirstOrder) {
    // Stationary variance of the Euler chain: κdt/(1-(1-λdt)²) = (κ/2λ)/(1-λdt/2).
    const double dt = 1e-6;
    const auto path = sample_path(kBaseline, dt, 2'000'000, 5, Discretization::euler_maruyama);
    const auto& x = path.samples;
    const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / x.size();
    EXPECT_NEAR(var, 0.05 / (1.0 - 0.05), 0.05 * 0.025);
}

TEST(OuStepMoments, MatchesDirectIntegrals) {
    // Conditional moments from φ0 = 0, computed by quadrature of the
    // Itô integrals: w = ∫ e^{-λ(dt-s)} dV, u = ∫ (1-e^{-λ(dt-s)})/λ dV.
    for (double dt : {1e-9, 1e-7, 3e-6, 1e-5, 5e-5}) {
        const double lam = kBaseline.lambda(), kap = kBaseline.kappa();
        using boost::math::quadrature::gauss_kronrod;
        auto quad = [&](auto f) { return gauss_kronrod<double, 61>::integrate(f, 0.0, dt); };
        const double var_w = kap * quad([&](double s) { return std::exp(-2 * lam * (dt - s)); });
        const double cov = kap * quad([&](double s) {
            const double e = std::exp(-lam * (dt - s));
            return e * (1 - e) / lam;
        });
        const double var_u = kap * quad([&](double s) {
            const double g = -std::expm1(-lam * (dt - s)) / lam;
            return g * g;
        });
        const auto m = ou_step_moments(kBaseline, dt);
        EXPECT_NEAR(m.decay, std::exp(-lam * dt), 1e-15);
        EXPECT_NEAR(m.integral_gain, -std::expm1(-lam * dt) / lam, 1e-15 * dt);
        EXPECT_NEAR(m.var_w / var_w, 1.0, 1e-10) << dt;
        EXPECT_NEAR(m.cov_wu / cov, 1.0, 1e-9) << dt;
        EXPECT_NEAR(m.var_u / var_u, 1.0, 1e-9) << dt;
    }
}
