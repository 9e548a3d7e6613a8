// Time-domain closed-loop simulation of adaptive phase estimation, the
// finite-window MMSE oracle and whiteness diagnostics.
#pragma once

#include "phasetrack/interferometer.hpp"
#include "phasetrack/ou_process.hpp"
#include "phasetrack/wiener.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasetrack {

/// Raised when the simulation produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelFidelity {
    linearized,     ///< r = g·φ + √N·n
    exact_homodyne  ///< trigonometric homodyne mean and state-dependent variance
};

const char* to_string(ModelFidelity fidelity);

/**
 * @brief Closed-loop run description
 *
 * Invariants (checked by validate()): dt·λ√(1+Λ) <= 0.02,
 * duration >= 100/λ, burn_in >= 10/λ and every |ε| lag fits in
 * duration - burn_in.
 */
struct SimConfig {
    ProcessParams process{1e4, 1e5};
    InterferometerConfig instrument = InterferometerConfig::mzi(1e7);
    double dt = 1e-8;
    double duration = 1.0;
    double burn_in = 1e-4;
    std::vector<double> epsilons{0.0};
    ModelFidelity fidelity = ModelFidelity::linearized;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Re-run with the measured tracking MSE inside N until it settles (NLI only).
    bool self_consistent = false;
    int max_self_consistent_iterations = 5;

    /// Leading post-burn-in samples kept for the whiteness diagnostics.
    std::size_t diagnostic_samples = std::size_t{1} << 17;
};

/// Largest dt·λ√(1+Λ) accepted.
inline constexpr double kMaxCutoffDt = 0.02;

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const SimConfig& cfg);

struct OffsetEstimate {
    double requested_epsilon = 0.0;
    double epsilon = 0.0;  ///< realized on the dt grid
    EstimationMode mode = EstimationMode::tracking;
    double analytic_mse = 0.0;
    double empirical_mse = 0.0;
    double standard_error = 0.0;
    double n_effective = 0.0;
    std::size_t n_samples = 0;

    /// (empirical - analytic) / standard_error
    double z_score() const { return (empirical_mse - analytic_mse) / standard_error; }
};

struct WhitenessResult {
    double max_abs_acf = 0.0;
    double threshold = 0.0;  ///< 3/√n
    std::size_t max_lag = 0;
    std::size_t samples = 0;
    bool pass = false;
};

struct EstimationReport {
    InstrumentKind kind = InstrumentKind::mzi;
    ModelFidelity fidelity = ModelFidelity::linearized;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    int replicas = 1;

    std::vector<OffsetEstimate> offsets;

    double sigma_f_sq_filter = 0.0;  ///< σ_f² inside the filter's N
    int self_consistent_iterations = 0;
    double analytic_snr = 0.0;
    double empirical_snr = 0.0;

    WhitenessResult raw_whiteness;       ///< photocurrent samples
    WhitenessResult whitened_whiteness;  ///< after W = 1/H⁺

    double orthogonality_max_corr = 0.0;  ///< max_k |corr(tracking error_i, r_{i-k})|
    double orthogonality_threshold = 0.0;  ///< 3/√n_effective of the tracking error

    const OffsetEstimate& at(double epsilon) const;
};

/**
 * Runs the adaptive loop: exact OU steps, photocurrent samples averaged over
 * each step with noise variance N/dt, feedback φ_f from the previous step,
 * tracking filter dφ_f/dt = -λ√(1+Λ)φ_f + χr integrated exactly for a
 * piecewise-constant input. Predictors and fixed-lag smoothers run on the
 * same record. Time-averaged squared errors after burn-in are reported with
 * 30-batch-means standard errors.
 */
EstimationReport run_closed_loop(const SimConfig& cfg);

/// Replicas on streams 0..count-1 of cfg.seed, merged in stream order.
EstimationReport run_replicas(const SimConfig& cfg, int count, unsigned workers = 0);

EstimationReport merge_reports(std::span<const EstimationReport> reports);

/// Open-loop photocurrent record and the phase it was generated from.
struct PhotocurrentRecord {
    double dt = 0.0;
    std::vector<double> phase;        ///< φ at t_i
    std::vector<double> photocurrent; ///< r averaged over [t_i, t_i + dt)
};

/// Linearized record r = √P·φ̄ + √(N/dt)·n of length n.
PhotocurrentRecord record_photocurrent(const ObservationSpectrum& obs, double dt, std::size_t n,
                                       std::uint64_t seed, std::uint64_t stream = 0);

/// z = W r, in the unit-PSD convention (sample variance ≈ 1/dt).
std::vector<double> whiten(std::span<const double> record, const ObservationSpectrum& obs,
                           double dt);

/// Max |sample ACF| over lags 1..max_lag against 3/√n. Needs n >= 1e5.
WhitenessResult whiteness_diagnostic(std::span<const double> stream, std::size_t max_lag = 100);

enum class MmseSampling {
    interval_average,  ///< r_j averages φ over its step (matches the simulator)
    point              ///< r_j samples φ at the step end
};

struct MmseResult {
    double mse = 0.0;
    std::size_t samples = 0;
    bool regularized = false;
    std::vector<std::string> warnings;
};

/// Largest window/dt accepted by brute_force_mmse.
inline constexpr std::size_t kMaxMmseSamples = 5000;

/**
 * Finite-window linear MMSE of φ(T + ε) from n = window/dt samples on
 * [0, T], solved with the analytic covariances:
 *   K_d(0) - k_drᵀ K_r⁻¹ k_dr,   K_r = P·C_φ + (N/dt)·I,  k_dr = √P·c_φ.
 */
MmseResult brute_force_mmse(const ObservationSpectrum& obs, double epsilon, double window,
                            double dt, MmseSampling sampling = MmseSampling::interval_average);

}  // namespace phasetrack
