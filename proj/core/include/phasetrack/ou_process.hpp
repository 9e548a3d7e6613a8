// Ornstein-Uhlenbeck phase process: exact statistics and sample paths.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace phasetrack {

/**
 * @brief Parameters of the stationary OU phase
 *
 *   dφ/dt = -λ φ + √κ dV/dt
 *
 * κ is the Wiener-noise magnitude [rad²/s], λ the inverse correlation
 * time [rad/s]. Both must be strictly positive.
 */
class ProcessParams {
public:
    ProcessParams(double kappa, double lambda);

    double kappa() const { return kappa_; }
    double lambda() const { return lambda_; }

    /// κ/(2λ), the stationary variance K_φ(0).
    double stationary_variance() const { return kappa_ / (2.0 * lambda_); }

    friend bool operator==(const ProcessParams&, const ProcessParams&) = default;

private:
    double kappa_;
    double lambda_;
};

double stationary_variance(const ProcessParams& p);

/// (κ/2λ)·exp(-λ|τ|)
double autocorrelation(const ProcessParams& p, double tau);

/// κ/(ω²+λ²)
double spectral_density(const ProcessParams& p, double omega);

enum class Discretization {
    exact,          ///< φ·e^{-λdt} + √((κ/2λ)(1-e^{-2λdt}))·n
    euler_maruyama  ///< φ·(1-λdt) + √(κdt)·n
};

/// A discrete realization of φ(t) on a uniform grid.
struct PhasePath {
    double dt = 0.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
};

/// Largest λ·dt accepted by sample_path.
inline constexpr double kMaxLambdaDt = 0.1;

/**
 * Draws n samples spaced dt apart. The first sample comes from the
 * stationary law N(0, κ/2λ) unless @p initial is given. Reproducible:
 * the output is a pure function of (params, dt, n, seed, stream, scheme).
 *
 * Throws std::invalid_argument for dt <= 0, n == 0 or λ·dt > 0.1.
 */
PhasePath sample_path(const ProcessParams& p, double dt, std::size_t n, std::uint64_t seed,
                      Discretization scheme = Discretization::exact, std::uint64_t stream = 0,
                      std::optional<double> initial = std::nullopt);

/**
 * Moments of one exact OU step of length dt together with the integral of
 * the path over that step. Starting from φ0:
 *
 *   φ(dt)         = decay·φ0 + w
 *   ∫₀^dt φ(s) ds = integral_gain·φ0 + u
 *
 * with (w, u) zero-mean jointly Gaussian. Small λ·dt uses series forms
 * so var_u (~κdt³/3) keeps full relative precision.
 */
struct OuStepMoments {
    double decay = 0.0;
    double integral_gain = 0.0;
    double var_w = 0.0;
    double cov_wu = 0.0;
    double var_u = 0.0;
};

OuStepMoments ou_step_moments(const ProcessParams& p, double dt);

}  // namespace phasetrack
