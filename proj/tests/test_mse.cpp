#include "phasetrack/mse.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace phasetrack;

namespace {

const ProcessParams kBaseline{1e4, 1e5};

// Right-hand side of the implicit tracking equation, evaluated in long double.
long double implicit_rhs(double gain_sq, double flux, const ProcessParams& p, long double sigma) {
    const long double G2 = gain_sq, A = G2 * (G2 - 1);
    const long double alpha2 = flux / (2 * G2 - 1);
    const long double P = 4 * A * alpha2, N = 2 * A * sigma + 1;
    const long double lam = p.lambda(), kap = p.kappa();
    const long double Lambda = P * kap / (N * lam * lam);
    const long double s = std::sqrt(1 + Lambda);
    return kap / (2 * lam) * (1 - Lambda / ((1 + s) * (1 + s)));
}

}  // namespace

TEST(TrackingMse, BaselineValues) {
    EXPECT_NEAR(tracking_mse(InterferometerConfig::nli(7.4, 1e7), kBaseline), 1.074e-2, 5e-6);
    EXPECT_NEAR(tracking_mse(InterferometerConfig::mzi(1e7), kBaseline), 2.317e-2, 5e-6);
    const double s = std::sqrt(11.0);
    EXPECT_NEAR(tracking_mse_mzi(InterferometerConfig::mzi(1e7), kBaseline),
                0.05 * (1 - 10 / ((1 + s) * (1 + s))), 1e-16);
    EXPECT_THROW(tracking_mse_nli(InterferometerConfig::mzi(1e7), kBaseline), std::invalid_argument);
    EXPECT_THROW(tracking_mse_mzi(InterferometerConfig::nli(2.0, 1e7), kBaseline), std::invalid_argument);
}

TEST(TrackingMse, ExplicitRootSolvesImplicitEquation) {
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 5; ++j) {
            const double g = 1.05 * std::pow(1000.0 / 1.05, i / 9.0);
            const double flux = std::pow(10.0, 5.0 + 1.5 * j);
            const double sigma = tracking_mse(InterferometerConfig::nli(g, flux), kBaseline);
            const long double rhs = implicit_rhs(g, flux, kBaseline, sigma);
            EXPECT_NEAR(static_cast<double>(rhs / sigma), 1.0, 1e-10) << g << " " << flux;
        }
}

TEST(TrackingMse, FixedPointIterationAgrees) {
    const auto cfg = InterferometerConfig::nli(7.4, 1e7);
    const auto fp = tracking_mse_fixed_point(cfg, kBaseline);
    EXPECT_TRUE(fp.converged);
    EXPECT_LE(fp.iterations, 10000);
    EXPECT_NEAR(fp.value, tracking_mse(cfg, kBaseline), 1e-11);
}

TEST(TrackingMse, Limits) {
    // κ → 0: perfect tracking.
    EXPECT_LT(tracking_mse(InterferometerConfig::nli(7.4, 1e7), ProcessParams(1e-20, 1e5)), 1e-20);
    // Vanishing flux: the no-information ceiling κ/2λ.
    EXPECT_NEAR(tracking_mse(InterferometerConfig::nli(7.4, 1e-6), kBaseline), 0.05, 1e-9);
    EXPECT_NEAR(tracking_mse_for_information(kBaseline, 0.0), 0.05, 1e-17);
    // MZI large-information limit: (κ/2λ)(2/√Λ₁) = √(κ/|β|²).
    const double flux = 1e6 * 1e10 / 1e4;  // Λ₁ = 1e6
    const double exact = tracking_mse(InterferometerConfig::mzi(flux), kBaseline);
    EXPECT_NEAR(exact / std::sqrt(1e4 / flux), 1.0, 0.01);
    EXPECT_NEAR(smoothing_floor_mse(InterferometerConfig::mzi(flux), kBaseline) /
                    (0.5 * std::sqrt(1e4 / flux)),
                1.0, 0.01);
}

TEST(OffsetMse, BranchIdentitiesAtZero) {
    for (double Lambda : {0.0, 0.3, 10.0, 68.0, 1e6}) {
        const double s = std::sqrt(1 + Lambda);
        const double track = 0.05 * (1 - Lambda / ((1 + s) * (1 + s)));
        const double smooth = 0.05 * (1 / s + Lambda / ((1 + s) * (1 + s) * s));
        EXPECT_NEAR(offset_mse_for_information(kBaseline, Lambda, 0.0), track, 1e-12 * track);
        EXPECT_NEAR(smooth, track, 1e-12 * track);
        EXPECT_NEAR(offset_mse_for_information(kBaseline, Lambda, 1e-300), track, 1e-12 * track);
        EXPECT_NEAR(offset_mse_for_information(kBaseline, Lambda, -1e-300), track, 1e-12 * track);
    }
}

TEST(OffsetMse, BreakdownConsistency) {
    for (const auto& cfg : {InterferometerConfig::nli(7.4, 1e7), InterferometerConfig::mzi(1e7)})
        for (double eps : {-1e-4, -1e-5, -1e-6, 0.0, 1e-6, 1e-5, 1e-4}) {
            const auto b = offset_mse(cfg, kBaseline, eps);
            EXPECT_NEAR(b.xi, b.prior_variance - b.information_integral, 1e-12 * b.prior_variance);
            EXPECT_GT(b.xi, 0.0);
            EXPECT_LE(b.xi, b.prior_variance);
            EXPECT_DOUBLE_EQ(b.prior_variance, 0.05);
            EXPECT_EQ(b.mode, mode_for_offset(eps));
        }
}

TEST(OffsetMse, MonotoneBoundedAndNliDominates) {
    for (double g : {6.5, 7.0, 7.4, 8.0, 8.5}) {
        const auto nli = InterferometerConfig::nli(g, 1e7);
        const auto mzi = InterferometerConfig::mzi(1e7);
        double prev = 0.0;
        for (int k = -200; k <= 200; ++k) {
            const double eps = k * 0.05 / 1e5;  // [-10/λ, 10/λ]
            const double xi = offset_mse(nli, kBaseline, eps).xi;
            EXPECT_GE(xi, prev) << eps;
            EXPECT_LE(xi, 0.05);
            EXPECT_LT(xi, offset_mse(mzi, kBaseline, eps).xi) << g << " " << eps;
            prev = xi;
        }
    }
}

TEST(OffsetMse, Limits) {
    const auto nli = InterferometerConfig::nli(7.4, 1e7);
    EXPECT_NEAR(offset_mse(nli, kBaseline, 1.0).xi, 0.05, 1e-15);
    const double s = observation_spectrum(nli, kBaseline).root();
    EXPECT_NEAR(offset_mse(nli, kBaseline, -1.0).xi, 0.05 / s, 1e-15);
    EXPECT_DOUBLE_EQ(smoothing_floor_mse(nli, kBaseline), 0.05 / s);
    // The smoothing floor is close to half of the tracking error.
    const double ratio = tracking_mse(nli, kBaseline) / smoothing_floor_mse(nli, kBaseline);
    EXPECT_GE(ratio, 1.7);
    EXPECT_LE(ratio, 2.3);
}

TEST(OffsetMse, NoiseLevelUsesTrackingError) {
    const auto nli = InterferometerConfig::nli(7.4, 1e7);
    const double sigma = tracking_mse(nli, kBaseline);
    for (double eps : {-5e-6, 5e-6}) {
        const auto b = offset_mse(nli, kBaseline, eps);
        EXPECT_DOUBLE_EQ(b.sigma_f_sq, sigma);
        EXPECT_DOUBLE_EQ(b.information, observation_spectrum(nli, kBaseline).information());
    }
}
