// Causal Wiener filter for an OU phase observed in white noise.
//
// The observation r(t) = √P φ(t) + √N n(t) has
//
//   S_r(ω) = Pκ/(ω² + λ²) + N = H⁺(ω)·H⁺(ω)*,
//   H⁺(ω)  = √N (iω + λ√(1+Λ)) / (iω + λ),   Λ = Pκ/(Nλ²).
//
// Transforms use H(ω) = ∫ h(t) e^{-iωt} dt.
#pragma once

#include "phasetrack/interferometer.hpp"
#include "phasetrack/ou_process.hpp"

#include <complex>
#include <vector>

namespace phasetrack {

using Complex = std::complex<double>;

class ObservationSpectrum {
public:
    /// Throws std::invalid_argument unless signal_power >= 0 and noise_level > 0.
    ObservationSpectrum(double signal_power, double noise_level, ProcessParams process);

    double signal_power() const { return signal_power_; }
    double noise_level() const { return noise_level_; }
    const ProcessParams& process() const { return process_; }

    /// Λ = Pκ/(Nλ²)
    double information() const { return information_; }
    /// √(1+Λ)
    double root() const;
    /// λ√(1+Λ)
    double cutoff() const { return process_.lambda() * root(); }

    double density(double omega) const;

private:
    double signal_power_;
    double noise_level_;
    ProcessParams process_;
    double information_;
};

ObservationSpectrum observation_spectrum(const PhotocurrentModel& model,
                                         const ProcessParams& process);

/// One-zero, one-pole minimum-phase factor of S_r and its inverse W = 1/H⁺.
struct SpectralFactor {
    double scale = 1.0;  ///< √N
    double zero = 0.0;   ///< λ√(1+Λ)
    double pole = 0.0;   ///< λ

    Complex response(double omega) const;
    Complex whitening(double omega) const;
};

SpectralFactor factorize(const ObservationSpectrum& obs);

/**
 * Cross-correlation between d(t) = φ(t+ε) and the whitened record z:
 *   C·e^{-λ(τ+ε)}       τ+ε >= 0
 *   C·e^{λ√(1+Λ)(τ+ε)}  τ+ε < 0,     C = √P κ / (√N λ (1+√(1+Λ))).
 */
double cross_correlation_kdz(const ObservationSpectrum& obs, double epsilon, double tau);

enum class EstimationMode { prediction, tracking, smoothing };

EstimationMode mode_for_offset(double epsilon);
const char* to_string(EstimationMode mode);

/**
 * @brief Optimal causal processor for d(t) = φ(t+ε)
 *
 * tracking   h(t) = χ e^{-ct},                     c = λ√(1+Λ)
 * prediction h(t) = e^{-λε} χ e^{-ct}
 * smoothing  h(t) = K [e^{-c|t-L|} + ρ e^{-cL} e^{-ct}],  L = -ε,
 *            K = κ√P/(2Nλ√(1+Λ)), ρ = (√(1+Λ)-1)/(√(1+Λ)+1)
 *
 * with χ = κ√P/(Nλ(1+√(1+Λ))); all vanish for t < 0. The smoothing
 * response is the delayed two-sided kernel plus the correction that
 * cancels its anticausal half.
 */
class WienerSolution {
public:
    WienerSolution(const ObservationSpectrum& obs, double epsilon);

    double epsilon() const { return epsilon_; }
    EstimationMode mode() const { return mode_; }
    double cutoff() const { return cutoff_; }
    /// χ, the input gain of the tracking ODE dφ_f/dt = -c φ_f + χ r.
    double tracking_gain() const { return chi_; }
    /// K and ρ of the smoothing kernel.
    double smoothing_scale() const { return smooth_scale_; }
    double smoothing_reflection() const { return rho_; }
    const ObservationSpectrum& spectrum() const { return obs_; }

    /// H_o(ω)
    Complex response(double omega) const;
    /// h_o(t)
    double impulse_response(double t) const;
    /// K_dz(τ) for this offset.
    double kdz(double tau) const { return cross_correlation_kdz(obs_, epsilon_, tau); }

    /**
     * Tracking response times e^{iωε}. For ε > 0 this is a pure time
     * advance of the tracking filter (non-causal); its MSE would equal the
     * tracking MSE. The causal optimum carries e^{-λε} instead.
     */
    Complex advance_form_response(double omega) const;

    /// ∫₀^∞ |h_o(t)| dt
    double absolute_area() const;
    /// ∫_H^∞ |h_o(t)| dt
    double tail_area(double horizon) const;

    /// max(40/λ, 40/c) + |ε| for smoothing.
    double default_horizon() const;

private:
    ObservationSpectrum obs_;
    double epsilon_;
    EstimationMode mode_;
    double cutoff_;
    double chi_;
    double smooth_scale_;
    double rho_;
};

WienerSolution synthesize(const ObservationSpectrum& obs, double epsilon);

/**
 * Bin-averaged samples of h_o: taps[k] = (1/dt)∫_{k dt}^{(k+1)dt} h_o(t) dt,
 * so Σ taps·dt equals the integral of h_o over the horizon.
 */
struct SampledKernel {
    double dt = 0.0;
    std::vector<double> taps;
    double tail_fraction = 0.0;  ///< truncated |h| mass / total |h| mass

    double dc_gain() const;
};

/// Throws std::invalid_argument if dt <= 0 or the tail beyond horizon exceeds tail_tolerance.
SampledKernel realize_impulse_response(const WienerSolution& sol, double dt, double horizon,
                                       double tail_tolerance = 1e-9);

/**
 * Streaming realization of the processor on a sampled record, where r[i]
 * is the photocurrent averaged over [t_i, t_i+dt).
 *
 * Output i is d_f(t_i), the estimate of φ(t_i + ε) formed from r[0..i-1].
 * Smoothing is a fixed-lag smoother: with L = -ε = m·dt it needs the
 * forward state at t_i - L, the window sum over [t_i - L, t_i) and the
 * forward state at t_i, so the first m outputs are NaN. ε is rounded to
 * the nearest multiple of dt, see realized_epsilon().
 */
class OffsetEstimator {
public:
    OffsetEstimator(const WienerSolution& sol, double dt);

    /// Sample lag m with ε ≈ m·dt (positive for prediction).
    long lag() const { return lag_; }
    /// ε realized on the grid, lag()·dt.
    double realized_epsilon() const { return lag_ * dt_; }

    /// Applies the processor to a full record.
    std::vector<double> apply(const std::vector<double>& record) const;

    // Building blocks shared with the simulator.
    double decay() const { return decay_; }         ///< e^{-c dt}
    double bin_weight() const { return weight_; }   ///< (1 - e^{-c dt})/c
    double forward_scale() const { return forward_scale_; }
    double window_scale() const { return window_scale_; }
    double tail_scale() const { return tail_scale_; }

private:
    double dt_;
    long lag_;
    EstimationMode mode_;
    double decay_;
    double weight_;
    double forward_scale_;
    double window_scale_;
    double tail_scale_;
};

}  // namespace phasetrack
