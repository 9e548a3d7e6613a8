#include "phasetrack/montecarlo.hpp"

#include "phasetrack/mse.hpp"
#include "phasetrack/parallel.hpp"
#include "rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace phasetrack {

namespace {

constexpr std::size_t kBatches = 30;
constexpr std::size_t kOrthoLags = 8;
constexpr std::size_t kBlock = std::size_t{1} << 16;

struct OffsetPlan {
    double requested = 0.0;
    double epsilon = 0.0;
    long lag = 0;
    EstimationMode mode = EstimationMode::tracking;
    double forward_scale = 0.0;
    double window_scale = 0.0;
    double tail_scale = 0.0;
    double decay_pow = 1.0;  ///< b^m for smoothing
    double analytic = 0.0;
};

struct ErrorAccumulator {
    std::array<double, kBatches> batch_sum{};
    std::array<std::size_t, kBatches> batch_count{};
    double sum = 0.0;
    double sum_sq = 0.0;  ///< Σ e⁴
    std::size_t count = 0;

    void add(double e2, std::size_t batch) {
        batch_sum[batch] += e2;
        ++batch_count[batch];
        sum += e2;
        sum_sq += e2 * e2;
        ++count;
    }

    double mean() const { return sum / static_cast<double>(count); }

    double standard_error() const {
        std::array<double, kBatches> means{};
        for (std::size_t b = 0; b < kBatches; ++b)
            means[b] = batch_sum[b] / static_cast<double>(batch_count[b]);
        const double m = std::accumulate(means.begin(), means.end(), 0.0) / kBatches;
        double ss = 0.0;
        for (double x : means) ss += (x - m) * (x - m);
        return std::sqrt(ss / (kBatches - 1) / kBatches);
    }

    double n_effective() const {
        const double n = static_cast<double>(count);
        const double m = mean();
        const double var = std::max(sum_sq / n - m * m, 0.0);
        const double se = standard_error();
        if (!(se > 0.0)) return n;
        return std::min(var / (se * se), n);
    }
};

struct LoopOutput {
    std::vector<ErrorAccumulator> offsets;
    ErrorAccumulator tracking;
    std::size_t steps = 0;

    double snr_cross = 0.0;   // Σ r·φ̄
    double snr_signal = 0.0;  // Σ φ̄²
    double snr_total = 0.0;   // Σ r²
    std::size_t snr_count = 0;

    std::vector<double> raw;
    std::vector<double> whitened;

    std::array<double, kOrthoLags + 1> ortho_cross{};
    double ortho_err = 0.0;
    double ortho_rec = 0.0;
};

std::size_t step_count(double duration, double dt) {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

std::vector<OffsetPlan> make_plans(const SimConfig& cfg, const ObservationSpectrum& filter_obs) {
    std::vector<OffsetPlan> plans;
    for (double eps : cfg.epsilons) {
        const OffsetEstimator est(WienerSolution(filter_obs, eps), cfg.dt);
        OffsetPlan plan;
        plan.requested = eps;
        plan.lag = est.lag();
        plan.epsilon = est.realized_epsilon();
        plan.mode = mode_for_offset(plan.epsilon);
        plan.forward_scale = est.forward_scale();
        plan.window_scale = est.window_scale();
        plan.tail_scale = est.tail_scale();
        if (plan.mode == EstimationMode::smoothing)
            plan.decay_pow = std::pow(est.decay(), static_cast<double>(-plan.lag));
        plan.analytic = offset_mse(cfg.instrument, cfg.process, plan.epsilon).xi;
        plans.push_back(plan);
    }
    return plans;
}

LoopOutput simulate(const SimConfig& cfg, const std::vector<OffsetPlan>& plans,
                    double sigma_filter) {
    const auto& p = cfg.process;
    const auto& inst = cfg.instrument;
    const double dt = cfg.dt;
    const PhotocurrentModel model = build_photocurrent_model(inst, sigma_filter);
    const ObservationSpectrum obs(model.signal_power(), model.noise_power, p);
    const WienerSolution tracker(obs, 0.0);
    const OffsetEstimator track_est(tracker, dt);
    const double chi = tracker.tracking_gain();
    const double b = track_est.decay();
    const double w = track_est.bin_weight();

    const OuStepMoments mom = ou_step_moments(p, dt);
    const double sw = std::sqrt(mom.var_w);
    const double cu = mom.var_w > 0.0 ? mom.cov_wu / sw : 0.0;
    const double su = std::sqrt(std::max(mom.var_u - cu * cu, 0.0));
    const double inv_dt = 1.0 / dt;
    const double inv_sqrt_dt = std::sqrt(inv_dt);

    const double gain = model.signal_gain;
    const double lin_noise = std::sqrt(model.noise_power) * inv_sqrt_dt;
    const double amp_a = inst.kind() == InstrumentKind::nli ? inst.gain_product() : 0.0;
    const bool exact = cfg.fidelity == ModelFidelity::exact_homodyne;
    const bool is_nli = inst.kind() == InstrumentKind::nli;

    const double white_shift = p.lambda() * (obs.root() - 1.0);
    const double white_scale = 1.0 / std::sqrt(model.noise_power);

    long max_pred = 0, max_smooth = 0;
    for (const auto& plan : plans) {
        if (plan.mode == EstimationMode::prediction) max_pred = std::max(max_pred, plan.lag);
        if (plan.mode == EstimationMode::smoothing) max_smooth = std::max(max_smooth, -plan.lag);
    }
    const std::size_t pad_back = std::max<std::size_t>(max_smooth, kOrthoLags);
    const auto pad_fwd = static_cast<std::size_t>(max_pred);
    const std::size_t pad = pad_back + pad_fwd;
    const std::size_t cap = pad + kBlock;

    const std::size_t n_steps = step_count(cfg.duration, dt);
    const std::size_t burn_steps = step_count(cfg.burn_in, dt);
    const std::size_t total_steps = n_steps + pad_fwd;
    const std::size_t eval_start = std::max(burn_steps, pad_back);
    const std::size_t n_eval = n_steps - eval_start;

    std::vector<double> phi_buf(cap), f_buf(cap), r_buf(cap), back(cap + 1);

    detail::NormalStream normal(cfg.seed, cfg.stream);
    double phi = std::sqrt(p.stationary_variance()) * normal();
    double f_state = 0.0;

    LoopOutput out;
    out.offsets.resize(plans.size());
    out.raw.reserve(cfg.diagnostic_samples);
    out.whitened.reserve(cfg.diagnostic_samples);

    std::size_t base = 0;    // global index of buffer position 0
    std::size_t filled = 0;  // valid positions in the buffers
    std::size_t global = 0;  // next step to simulate

    while (true) {
        while (filled < cap && global < total_steps) {
            const double z1 = normal();
            const double z2 = normal();
            const double z3 = normal();
            const double wstep = sw * z1;
            const double ustep = cu * z1 + su * z2;
            const double avg = (mom.integral_gain * phi + ustep) * inv_dt;
            const double fb = chi * f_state;

            double r;
            if (!exact) {
                r = gain * avg + lin_noise * z3;
            } else {
                const double x = avg - fb;
                if (is_nli) {
                    const double h = std::sin(0.5 * x);
                    const double sd = std::sqrt(8.0 * amp_a * h * h + 1.0);
                    r = gain * std::sin(x) + sd * inv_sqrt_dt * z3 + gain * fb;
                } else {
                    r = gain * std::sin(x) + inv_sqrt_dt * z3 + gain * fb;
                }
            }

            phi_buf[filled] = phi;
            f_buf[filled] = f_state;
            r_buf[filled] = r;

            if (global >= burn_steps && global < n_steps) {
                out.snr_cross += r * avg;
                out.snr_signal += avg * avg;
                out.snr_total += r * r;
                ++out.snr_count;
                if (out.raw.size() < cfg.diagnostic_samples) {
                    out.raw.push_back(r);
                    out.whitened.push_back((r - white_shift * f_state) * white_scale);
                }
            }

            f_state = b * f_state + w * r;
            phi = mom.decay * phi + wstep;
            ++filled;
            ++global;
        }
        if (!std::isfinite(phi) || !std::isfinite(f_state)) {
            std::ostringstream msg;
            msg << "closed loop diverged before step " << global << " (phase " << phi
                << ", filter state " << f_state << ")";
            throw NumericalError(msg.str());
        }

        const std::size_t end = filled;
        back[end] = 0.0;
        if (max_smooth > 0)
            for (std::size_t q = end; q-- > 0;) back[q] = b * back[q + 1] + w * r_buf[q];

        const std::size_t q_end = end > pad_fwd ? end - pad_fwd : 0;
        for (std::size_t q = pad_back; q < q_end; ++q) {
            const std::size_t i = base + q;
            if (i < eval_start) continue;
            if (i >= n_steps) break;
            const std::size_t batch = std::min((i - eval_start) * kBatches / n_eval, kBatches - 1);

            const double e_track = phi_buf[q] - chi * f_buf[q];
            out.tracking.add(e_track * e_track, batch);
            out.ortho_err += e_track * e_track;
            for (std::size_t k = 1; k <= kOrthoLags; ++k) out.ortho_cross[k] += e_track * r_buf[q - k];
            out.ortho_rec += r_buf[q - 1] * r_buf[q - 1];

            for (std::size_t j = 0; j < plans.size(); ++j) {
                const OffsetPlan& plan = plans[j];
                double e;
                switch (plan.mode) {
                    case EstimationMode::tracking:
                        e = phi_buf[q] - plan.forward_scale * f_buf[q];
                        break;
                    case EstimationMode::prediction:
                        e = phi_buf[q + plan.lag] - plan.forward_scale * f_buf[q];
                        break;
                    case EstimationMode::smoothing: {
                        const std::size_t u = q - static_cast<std::size_t>(-plan.lag);
                        const double window = back[u] - plan.decay_pow * back[q];
                        e = phi_buf[u] - (plan.forward_scale * f_buf[u] +
                                          plan.window_scale * window + plan.tail_scale * f_buf[q]);
                        break;
                    }
                }
                out.offsets[j].add(e * e, batch);
            }
        }

        if (global >= total_steps) break;
        std::copy(phi_buf.begin() + (end - pad), phi_buf.begin() + end, phi_buf.begin());
        std::copy(f_buf.begin() + (end - pad), f_buf.begin() + end, f_buf.begin());
        std::copy(r_buf.begin() + (end - pad), r_buf.begin() + end, r_buf.begin());
        base += end - pad;
        filled = pad;
    }
    out.steps = global;

    for (const auto& acc : out.offsets)
        if (!std::isfinite(acc.sum)) throw NumericalError("non-finite estimation error");
    return out;
}

WhitenessResult whiteness_of(const std::vector<double>& samples) {
    if (samples.size() < 100000) return {};
    return whiteness_diagnostic(samples);
}

}  // namespace

const char* to_string(ModelFidelity fidelity) {
    return fidelity == ModelFidelity::linearized ? "linearized" : "exact";
}

void validate(const SimConfig& cfg) {
    const double lam = cfg.process.lambda();
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw std::invalid_argument("SimConfig: dt must be > 0");
    const double cutoff = observation_spectrum(cfg.instrument, cfg.process).cutoff();
    if (cutoff * cfg.dt > kMaxCutoffDt) {
        std::ostringstream msg;
        msg << "SimConfig: dt*cutoff = " << cutoff * cfg.dt << " exceeds " << kMaxCutoffDt
            << " (dt <= " << kMaxCutoffDt / cutoff << ")";
        throw std::invalid_argument(msg.str());
    }
    if (cfg.duration * lam < 100.0)
        throw std::invalid_argument("SimConfig: duration must be >= 100/lambda");
    if (cfg.burn_in * lam < 10.0)
        throw std::invalid_argument("SimConfig: burn_in must be >= 10/lambda");
    if (cfg.burn_in >= cfg.duration)
        throw std::invalid_argument("SimConfig: burn_in must be shorter than duration");
    if (cfg.duration / cfg.dt > 1e11)
        throw std::invalid_argument("SimConfig: duration/dt exceeds 1e11 steps");
    if (cfg.epsilons.empty()) throw std::invalid_argument("SimConfig: no offsets requested");
    for (double eps : cfg.epsilons) {
        if (!std::isfinite(eps)) throw std::invalid_argument("SimConfig: offset must be finite");
        if (std::abs(eps) >= 0.5 * (cfg.duration - cfg.burn_in))
            throw std::invalid_argument("SimConfig: |epsilon| must be below (duration - burn_in)/2");
    }
    if (cfg.self_consistent && cfg.max_self_consistent_iterations < 1)
        throw std::invalid_argument("SimConfig: max_self_consistent_iterations must be >= 1");
}

const OffsetEstimate& EstimationReport::at(double epsilon) const {
    for (const auto& o : offsets)
        if (o.requested_epsilon == epsilon || o.epsilon == epsilon) return o;
    throw std::out_of_range("EstimationReport: offset not simulated");
}

EstimationReport run_closed_loop(const SimConfig& cfg) {
    validate(cfg);
    const double sigma_closed = tracking_mse(cfg.instrument, cfg.process);

    double sigma_filter = sigma_closed;
    int iterations = 0;
    LoopOutput loop;
    std::vector<OffsetPlan> plans;
    const bool iterate = cfg.self_consistent && cfg.instrument.kind() == InstrumentKind::nli;
    while (true) {
        const PhotocurrentModel model = build_photocurrent_model(cfg.instrument, sigma_filter);
        const ObservationSpectrum filter_obs(model.signal_power(), model.noise_power, cfg.process);
        plans = make_plans(cfg, filter_obs);
        loop = simulate(cfg, plans, sigma_filter);
        ++iterations;
        if (!iterate || iterations >= cfg.max_self_consistent_iterations) break;
        const double measured = loop.tracking.mean();
        const double tol = std::max(1e-3 * sigma_filter, 2.0 * loop.tracking.standard_error());
        const bool settled = std::abs(measured - sigma_filter) <= tol;
        sigma_filter = measured;
        if (settled) break;
    }

    EstimationReport rep;
    rep.kind = cfg.instrument.kind();
    rep.fidelity = cfg.fidelity;
    rep.seed = cfg.seed;
    rep.steps = loop.steps;
    rep.sigma_f_sq_filter = sigma_filter;
    rep.self_consistent_iterations = iterations;

    for (std::size_t j = 0; j < plans.size(); ++j) {
        const auto& acc = loop.offsets[j];
        OffsetEstimate o;
        o.requested_epsilon = plans[j].requested;
        o.epsilon = plans[j].epsilon;
        o.mode = plans[j].mode;
        o.analytic_mse = plans[j].analytic;
        o.empirical_mse = acc.mean();
        o.standard_error = acc.standard_error();
        o.n_effective = acc.n_effective();
        o.n_samples = acc.count;
        rep.offsets.push_back(o);
    }

    rep.analytic_snr = photocurrent_model(cfg.instrument, cfg.process).snr();
    {
        const double n = static_cast<double>(loop.snr_count);
        const double g = loop.snr_cross / loop.snr_signal;
        const double resid = std::max(loop.snr_total - g * loop.snr_cross, 0.0) / n;
        rep.empirical_snr = g * g / (resid * cfg.dt);
    }

    rep.raw_whiteness = whiteness_of(loop.raw);
    rep.whitened_whiteness = whiteness_of(loop.whitened);

    double worst = 0.0;
    const double norm = std::sqrt(loop.ortho_err * loop.ortho_rec);
    for (std::size_t k = 1; k <= kOrthoLags; ++k)
        worst = std::max(worst, std::abs(loop.ortho_cross[k]) / norm);
    rep.orthogonality_max_corr = worst;
    rep.orthogonality_threshold = 3.0 / std::sqrt(loop.tracking.n_effective());
    return rep;
}

EstimationReport run_replicas(const SimConfig& cfg, int count, unsigned workers) {
    if (count < 1) throw std::invalid_argument("run_replicas: count must be >= 1");
    validate(cfg);
    std::vector<EstimationReport> reports(static_cast<std::size_t>(count));
    parallel_for(
        reports.size(),
        [&](std::size_t i) {
            SimConfig local = cfg;
            local.stream = i;
            reports[i] = run_closed_loop(local);
        },
        workers);
    return merge_reports(reports);
}

EstimationReport merge_reports(std::span<const EstimationReport> reports) {
    if (reports.empty()) throw std::invalid_argument("merge_reports: nothing to merge");
    EstimationReport merged = reports.front();
    if (reports.size() == 1) return merged;

    const double r = static_cast<double>(reports.size());
    merged.replicas = 0;
    merged.steps = 0;
    merged.empirical_snr = 0.0;
    merged.orthogonality_max_corr = 0.0;
    for (auto& o : merged.offsets) {
        o.empirical_mse = 0.0;
        o.standard_error = 0.0;
        o.n_effective = 0.0;
        o.n_samples = 0;
    }
    for (const auto& rep : reports) {
        if (rep.offsets.size() != merged.offsets.size())
            throw std::invalid_argument("merge_reports: offset lists differ");
        merged.replicas += rep.replicas;
        merged.steps += rep.steps;
        merged.empirical_snr += rep.empirical_snr / r;
        // Keep the replica whose correlation is closest to its own threshold.
        if (rep.orthogonality_max_corr * merged.orthogonality_threshold >=
            merged.orthogonality_max_corr * rep.orthogonality_threshold) {
            merged.orthogonality_max_corr = rep.orthogonality_max_corr;
            merged.orthogonality_threshold = rep.orthogonality_threshold;
        }
        for (std::size_t j = 0; j < merged.offsets.size(); ++j) {
            auto& o = merged.offsets[j];
            const auto& src = rep.offsets[j];
            o.empirical_mse += src.empirical_mse / r;
            o.standard_error += src.standard_error * src.standard_error;
            o.n_effective += src.n_effective;
            o.n_samples += src.n_samples;
        }
    }
    for (auto& o : merged.offsets) o.standard_error = std::sqrt(o.standard_error) / r;
    return merged;
}

PhotocurrentRecord record_photocurrent(const ObservationSpectrum& obs, double dt, std::size_t n,
                                       std::uint64_t seed, std::uint64_t stream) {
    if (!(dt > 0.0)) throw std::invalid_argument("record_photocurrent: dt must be > 0");
    const auto& p = obs.process();
    const OuStepMoments mom = ou_step_moments(p, dt);
    const double sw = std::sqrt(mom.var_w);
    const double cu = mom.var_w > 0.0 ? mom.cov_wu / sw : 0.0;
    const double su = std::sqrt(std::max(mom.var_u - cu * cu, 0.0));
    const double gain = std::sqrt(obs.signal_power());
    const double noise = std::sqrt(obs.noise_level() / dt);

    detail::NormalStream normal(seed, stream);
    PhotocurrentRecord rec;
    rec.dt = dt;
    rec.phase.resize(n);
    rec.photocurrent.resize(n);
    double phi = std::sqrt(p.stationary_variance()) * normal();
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = normal();
        const double z2 = normal();
        const double z3 = normal();
        const double avg = (mom.integral_gain * phi + cu * z1 + su * z2) / dt;
        rec.phase[i] = phi;
        rec.photocurrent[i] = gain * avg + noise * z3;
        phi = mom.decay * phi + sw * z1;
    }
    return rec;
}

std::vector<double> whiten(std::span<const double> record, const ObservationSpectrum& obs,
                           double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("whiten: dt must be > 0");
    const double c = obs.cutoff();
    const double b = std::exp(-c * dt);
    const double w = -std::expm1(-c * dt) / c;
    const double shift = obs.process().lambda() * (obs.root() - 1.0);
    const double scale = 1.0 / std::sqrt(obs.noise_level());
    std::vector<double> z(record.size());
    double f = 0.0;
    for (std::size_t i = 0; i < record.size(); ++i) {
        z[i] = (record[i] - shift * f) * scale;
        f = b * f + w * record[i];
    }
    return z;
}

WhitenessResult whiteness_diagnostic(std::span<const double> stream, std::size_t max_lag) {
    const std::size_t n = stream.size();
    if (n < 100000) throw std::invalid_argument("whiteness_diagnostic: needs at least 1e5 samples");
    if (max_lag == 0 || max_lag >= n)
        throw std::invalid_argument("whiteness_diagnostic: max_lag out of range");
    const double mean = std::accumulate(stream.begin(), stream.end(), 0.0) / static_cast<double>(n);
    std::vector<double> x(n);
    std::transform(stream.begin(), stream.end(), x.begin(), [mean](double v) { return v - mean; });
    const double c0 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);

    WhitenessResult res;
    res.samples = n;
    res.max_lag = max_lag;
    res.threshold = 3.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double ck = std::inner_product(x.begin() + static_cast<std::ptrdiff_t>(k), x.end(),
                                             x.begin(), 0.0);
        res.max_abs_acf = std::max(res.max_abs_acf, std::abs(ck / c0));
    }
    res.pass = res.max_abs_acf <= res.threshold;
    return res;
}

MmseResult brute_force_mmse(const ObservationSpectrum& obs, double epsilon, double window,
                            double dt, MmseSampling sampling) {
    if (!(dt > 0.0)) throw std::invalid_argument("brute_force_mmse: dt must be > 0");
    if (!(window >= 0.0) || !std::isfinite(window) || !std::isfinite(epsilon))
        throw std::invalid_argument("brute_force_mmse: window must be finite and >= 0");
    const double samples = std::round(window / dt);
    if (samples > static_cast<double>(kMaxMmseSamples))
        throw std::invalid_argument("brute_force_mmse: window/dt exceeds 5000 samples");

    const auto& p = obs.process();
    const double v = p.stationary_variance();
    const double lam = p.lambda();
    const auto n = static_cast<std::size_t>(samples);
    MmseResult res;
    res.samples = n;
    res.mse = v;
    if (n == 0) return res;

    const double T = static_cast<double>(n) * dt;
    const double target = T + epsilon;
    const double x = lam * dt;

    Eigen::VectorXd lag_cov(n);  // covariance of samples m steps apart
    Eigen::VectorXd cross(n);    // Cov(sample j, φ(target))
    if (sampling == MmseSampling::point) {
        for (std::size_t m = 0; m < n; ++m) lag_cov[m] = v * std::exp(-x * static_cast<double>(m));
        for (std::size_t j = 0; j < n; ++j) {
            const double tj = static_cast<double>(j + 1) * dt;
            cross[j] = v * std::exp(-lam * std::abs(target - tj));
        }
    } else {
        // Averages of φ over [j dt, (j+1) dt).
        const double f = x < 1e-4 ? 1.0 - x / 2.0 + x * x / 6.0 : -std::expm1(-x) / x;
        double diag;
        if (x < 0.1) {
            // 2 Σ_{k>=2} (-x)^{k-2}/k!
            double term = 0.5, sum = 0.0;
            for (int k = 2; k < 20; ++k) {
                sum += term;
                term *= -x / (k + 1);
            }
            diag = 2.0 * v * sum;
        } else {
            diag = 2.0 * v * (x + std::expm1(-x)) / (x * x);
        }
        lag_cov[0] = diag;
        for (std::size_t m = 1; m < n; ++m)
            lag_cov[m] = v * std::exp(-x * static_cast<double>(m - 1)) * f * f;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = static_cast<double>(j) * dt;
            const double b = a + dt;
            if (target >= b) {
                cross[j] = v * std::exp(-lam * (target - b)) * f;
            } else if (target <= a) {
                cross[j] = v * std::exp(-lam * (a - target)) * f;
            } else {
                cross[j] = v / x * (-std::expm1(-lam * (target - a)) - std::expm1(-lam * (b - target)));
            }
        }
    }

    const double P = obs.signal_power();
    const double noise = obs.noise_level() / dt;
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            K(i, j) = P * lag_cov[i > j ? i - j : j - i] + (i == j ? noise : 0.0);
    const Eigen::VectorXd k = std::sqrt(P) * cross;

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
        const double jitter = 1e-12 * K.trace() / static_cast<double>(n);
        K.diagonal().array() += jitter;
        llt.compute(K);
        res.regularized = true;
        res.warnings.push_back("covariance ill-conditioned; added diagonal jitter");
        if (llt.info() != Eigen::Success)
            throw NumericalError("brute_force_mmse: covariance not positive definite");
    }
    res.mse = v - k.dot(llt.solve(k));
    return res;
}

}  // namespace phasetrack
