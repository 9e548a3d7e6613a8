#include "phasetrack/experiment.hpp"

#include "phasetrack/gain_optimizer.hpp"
#include "phasetrack/mse.hpp"
#include "phasetrack/parallel.hpp"
#include "phasetrack/version.hpp"
#include "phasetrack/wiener.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace phasetrack::sweep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

unsigned preset_bit(Preset p) { return 1u << static_cast<unsigned>(p); }

constexpr unsigned kFig2 = 1u << 0, kFig3 = 1u << 1, kFig4 = 1u << 2, kFig5 = 1u << 3,
                   kCustom = 1u << 4;
constexpr unsigned kAll = kFig2 | kFig3 | kFig4 | kFig5 | kCustom;
constexpr unsigned kPhysical = kFig3 | kFig4 | kFig5 | kCustom;
constexpr unsigned kMonteCarlo = kFig3 | kFig4 | kFig5 | kCustom;

struct NumericKey {
    const char* key;
    unsigned presets;
    double lower;
    bool lower_open;
    double upper;
    bool upper_open;
    bool integer;
    const char* help;
};

// clang-format off
constexpr std::array kNumericKeys{
    NumericKey{"kappa",          kPhysical,     0.0,   true,  kInf, true,  false, "OU diffusion rate κ [rad²/s]"},
    NumericKey{"lambda",         kPhysical,     0.0,   true,  kInf, true,  false, "OU mean-reversion rate λ [1/s]"},
    NumericKey{"photon_flux",    kFig3 | kFig4 | kCustom, 0.0, true, kInf, true, false, "photon flux |β|² [1/s]"},
    NumericKey{"gain_sq",        kFig4 | kCustom, 1.0, true,  1e4,  false, false, "NLI amplifier gain G² (G² > 1)"},
    NumericKey{"epsilon",        kCustom,       -kInf, true,  kInf, true,  false, "estimation offset ε [s]"},
    NumericKey{"gain_min",       kFig2 | kFig3, 1.0,   true,  1e4,  false, false, "lower G² of the sweep"},
    NumericKey{"gain_max",       kFig2 | kFig3, 1.0,   true,  1e4,  false, false, "upper G² of the sweep"},
    NumericKey{"gain_step",      kFig3,         0.0,   true,  kInf, true,  false, "G² step"},
    NumericKey{"sigma_max",      kFig2,         0.0,   true,  kInf, true,  false, "upper σ_f² of the surface [rad²]"},
    NumericKey{"grid_points",    kFig2,         2.0,   false, 4000, false, true,  "points per surface axis"},
    NumericKey{"lambda_eps_min", kFig4,         -kInf, true,  kInf, true,  false, "lower λε"},
    NumericKey{"lambda_eps_max", kFig4,         -kInf, true,  kInf, true,  false, "upper λε"},
    NumericKey{"flux_min",       kFig5,         0.0,   true,  kInf, true,  false, "lower |β|² [1/s]"},
    NumericKey{"flux_max",       kFig5,         0.0,   true,  kInf, true,  false, "upper |β|² [1/s]"},
    NumericKey{"sweep_min",      kCustom,       -kInf, true,  kInf, true,  false, "lower value of sweep_key"},
    NumericKey{"sweep_max",      kCustom,       -kInf, true,  kInf, true,  false, "upper value of sweep_key"},
    NumericKey{"sweep_points",   kFig4 | kFig5 | kCustom, 1.0, false, 1e6, false, true, "number of sweep points"},
    NumericKey{"replicas",       kMonteCarlo,   0.0,   false, 1000, false, true,  "Monte Carlo replicas per point (0 = analytic only)"},
    NumericKey{"mc_points",      kMonteCarlo,   1.0,   false, 1000, false, true,  "points with a Monte Carlo overlay"},
    NumericKey{"mc_duration",    kMonteCarlo,   0.0,   true,  kInf, true,  false, "simulated time per replica [s] (>= 100/λ)"},
    NumericKey{"mc_dt",          kMonteCarlo,   0.0,   false, kInf, true,  false, "simulation step [s] (0 = automatic)"},
    NumericKey{"workers",        kAll,          0.0,   false, 1024, false, true,  "worker threads (0 = all cores)"},
};
// clang-format on

struct TextKey {
    const char* key;
    unsigned presets;
    const char* range;
    const char* help;
};

constexpr std::array kTextKeys{
    TextKey{"kind", kCustom, "nli|mzi", "instrument of the custom sweep"},
    TextKey{"fidelity", kMonteCarlo, "linearized|exact", "photocurrent model of the simulation"},
    TextKey{"sweep_key", kCustom, "gain_sq|photon_flux|lambda_epsilon|kappa|lambda",
            "parameter swept by the custom preset"},
    TextKey{"sweep_scale", kCustom, "linear|log", "spacing of the custom sweep"},
    TextKey{"seed", kAll, "integer in [0, 2^64)", "base random seed"},
    TextKey{"out", kAll, "directory path", "output directory"},
    TextKey{"format", kAll, "csv,json", "artifact formats"},
    TextKey{"timestamp", kAll, "true|false", "add a generation time to headers"},
};

const NumericKey* find_numeric(std::string_view key) {
    for (const auto& k : kNumericKeys)
        if (key == k.key) return &k;
    return nullptr;
}

const TextKey* find_text(std::string_view key) {
    for (const auto& k : kTextKeys)
        if (key == k.key) return &k;
    return nullptr;
}

std::string fmt_num(double x) { return fmt::format("{}", x); }

std::string range_text(const NumericKey& k) {
    std::string lo, hi;
    if (std::isfinite(k.lower)) lo = fmt::format("{} {}", k.lower_open ? ">" : ">=", fmt_num(k.lower));
    if (std::isfinite(k.upper)) hi = fmt::format("{} {}", k.upper_open ? "<" : "<=", fmt_num(k.upper));
    std::string out = k.integer ? "integer" : "";
    for (const auto& part : {lo, hi}) {
        if (part.empty()) continue;
        if (!out.empty()) out += out == "integer" ? " " : ", ";
        out += part;
    }
    return out.empty() ? "finite" : out;
}

struct SweepDefaults {
    double lo, hi;
    bool log;
};

SweepDefaults custom_sweep_defaults(std::string_view key) {
    if (key == "photon_flux") return {1e6, 1e10, true};
    if (key == "lambda_epsilon") return {-1.0, 1.0, false};
    if (key == "kappa") return {1e3, 1e5, true};
    if (key == "lambda") return {1e4, 1e6, true};
    return {1.1, 50.0, false};
}

std::map<std::string, double> preset_defaults(Preset preset, std::string_view sweep_key) {
    std::map<std::string, double> d;
    d["workers"] = 0;
    if (preset == Preset::fig2_snr_surface) {
        d["gain_min"] = 1.01;
        d["gain_max"] = 50.0;
        d["sigma_max"] = 0.2;
        d["grid_points"] = 200;
        return d;
    }
    d["kappa"] = 1e4;
    d["lambda"] = 1e5;
    d["replicas"] = 0;
    d["mc_points"] = 5;
    d["mc_duration"] = 0.02;
    d["mc_dt"] = 0.0;
    switch (preset) {
        case Preset::fig3_gain_sweep:
            d["photon_flux"] = 1e7;
            d["gain_min"] = 1.1;
            d["gain_max"] = 50.0;
            d["gain_step"] = 0.1;
            break;
        case Preset::fig4_epsilon_sweep:
            d["photon_flux"] = 1e7;
            d["gain_sq"] = 7.4;
            d["lambda_eps_min"] = -1.0;
            d["lambda_eps_max"] = 1.0;
            d["sweep_points"] = 201;
            break;
        case Preset::fig5_scaling:
            d["flux_min"] = 1e9;
            d["flux_max"] = 1e10;
            d["sweep_points"] = 21;
            d["mc_points"] = 3;
            d["mc_duration"] = 2e-3;
            break;
        case Preset::custom: {
            const auto sd = custom_sweep_defaults(sweep_key);
            d["photon_flux"] = 1e7;
            d["gain_sq"] = 7.4;
            d["epsilon"] = 0.0;
            d["sweep_min"] = sd.lo;
            d["sweep_max"] = sd.hi;
            d["sweep_points"] = 50;
            break;
        }
        case Preset::fig2_snr_surface:
            break;
    }
    return d;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> parse_double(std::string_view text) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    if (first < last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view text) {
    const std::string t = lower(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    return std::nullopt;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 1) v.back() = hi;
    return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> v = linspace(std::log(lo), std::log(hi), n);
    for (auto& x : v) x = std::exp(x);
    v.front() = lo;
    if (n > 1) v.back() = hi;
    return v;
}

std::size_t count(const ExperimentSpec& spec, const char* key) {
    const double v = spec.param(key);
    if (!(v >= 1.0)) throw std::invalid_argument(fmt::format("{}: must be >= 1, got {}", key, v));
    return static_cast<std::size_t>(v);
}

ProcessParams process_of(const ExperimentSpec& spec) {
    return {spec.param("kappa"), spec.param("lambda")};
}

std::uint64_t point_seed(std::uint64_t base, std::uint64_t table, std::uint64_t point) {
    // splitmix64 finalizer over the combined index
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (1 + table * 1000003ULL + point);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct McRequest {
    InterferometerConfig instrument;
    ProcessParams process;
    std::vector<double> epsilons;
};

EstimationReport run_overlay(const ExperimentSpec& spec, const McRequest& req, std::uint64_t seed) {
    SimConfig cfg;
    cfg.process = req.process;
    cfg.instrument = req.instrument;
    const double cutoff = observation_spectrum(req.instrument, req.process).cutoff();
    const double dt_param = spec.param("mc_dt");
    cfg.dt = dt_param > 0.0 ? dt_param : std::min(1e-8, 0.5 * kMaxCutoffDt / cutoff);
    cfg.duration = spec.param("mc_duration");
    cfg.burn_in = 20.0 / req.process.lambda();
    cfg.epsilons = req.epsilons;
    cfg.fidelity = spec.fidelity;
    cfg.seed = seed;
    return run_replicas(cfg, spec.replicas, spec.workers);
}

const std::vector<std::string> kMcColumns{"instrument",    "x",           "epsilon",
                                          "analytic_mse",  "empirical_mse", "standard_error",
                                          "n_effective",   "z_score"};

void append_overlay_rows(Table& t, std::string_view instrument, double x,
                         const EstimationReport& rep) {
    for (const auto& o : rep.offsets)
        t.rows.push_back({std::string(instrument), x, o.epsilon, o.analytic_mse, o.empirical_mse,
                          o.standard_error, o.n_effective, o.z_score()});
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExperimentResult fig2(const ExperimentSpec& spec) {
    const std::size_t n = count(spec, "grid_points");
    const auto gains = logspace(spec.param("gain_min"), spec.param("gain_max"), n);
    const double smax = spec.param("sigma_max");
    const auto sigmas = linspace(0.0, smax, n);

    Table surface{"fig2_snr_surface", {"gain_sq", "sigma_f_sq", "snr_ratio"}, {}};
    surface.rows.resize(n * n);
    parallel_for(
        n,
        [&](std::size_t i) {
            for (std::size_t j = 0; j < n; ++j)
                surface.rows[i * n + j] = {gains[i], sigmas[j], snr_ratio(gains[i], sigmas[j])};
        },
        spec.workers);

    // ratio = 1  <=>  σ_f² = (4A/(2G²-1) - 1)/(2A),  A = G²(G²-1)
    Table contour{"fig2_unity_contour", {"gain_sq", "sigma_f_sq"}, {}};
    for (double g : gains) {
        const double a = g * (g - 1.0);
        const double s = (4.0 * a / (2.0 * g - 1.0) - 1.0) / (2.0 * a);
        if (s >= 0.0 && s <= smax) contour.rows.push_back({g, s});
    }

    ExperimentResult res;
    res.summary = {{"grid", fmt::format("{}x{} log(gain_sq) x linear(sigma_f_sq)", n, n)},
                   {"contour_points", static_cast<double>(contour.rows.size())}};
    res.tables = {std::move(surface), std::move(contour)};
    return res;
}

ExperimentResult fig3(const ExperimentSpec& spec) {
    const ProcessParams p = process_of(spec);
    const double flux = spec.param("photon_flux");
    const double gmin = spec.param("gain_min");
    const double gmax = spec.param("gain_max");
    const double step = spec.param("gain_step");
    const auto n = static_cast<std::size_t>(std::floor((gmax - gmin) / step + 1e-9)) + 1;
    const double mzi = tracking_mse(InterferometerConfig::mzi(flux), p);

    Table t{"fig3_gain_sweep", {"gain_sq", "nli_tracking_mse", "mzi_tracking_mse", "snr_ratio"}, {}};
    t.rows.resize(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            // snap to 12 significant digits so 1.1 + 0.1 reads as 1.2
            const double g = std::stod(fmt::format("{:.12g}", gmin + step * static_cast<double>(i)));
            const double nli = tracking_mse(InterferometerConfig::nli(g, flux), p);
            t.rows[i] = {g, nli, mzi, snr_ratio(g, nli)};
        },
        spec.workers);

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::get<double>(t.rows[i][1]) < std::get<double>(t.rows[best][1])) best = i;
    const double grid_gain = std::get<double>(t.rows[best][0]);
    const double grid_mse = std::get<double>(t.rows[best][1]);
    const GainOptimum opt = optimize_gain(p, flux, GainObjective::tracking);
    const double snr_gain = snr_optimal_gain(p, flux);

    ExperimentResult res;
    res.summary = {{"grid_minimum_gain_sq", grid_gain},
                   {"grid_minimum_mse", grid_mse},
                   {"optimal_gain_sq", opt.gain_sq},
                   {"optimal_mse", opt.mse},
                   {"snr_optimal_gain_sq", snr_gain},
                   {"mzi_tracking_mse", mzi},
                   {"minimum_below_mzi", grid_mse < mzi ? "true" : "false"}};
    res.tables.push_back(std::move(t));

    if (spec.replicas > 0) {
        Table mc{"fig3_montecarlo", kMcColumns, {}};
        const auto points = logspace(gmin, gmax, count(spec, "mc_points"));
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto rep = run_overlay(spec, {InterferometerConfig::nli(points[i], flux), p, {0.0}},
                                         point_seed(spec.seed, 3, i));
            append_overlay_rows(mc, "nli", points[i], rep);
        }
        const auto rep = run_overlay(spec, {InterferometerConfig::mzi(flux), p, {0.0}},
                                     point_seed(spec.seed, 3, points.size()));
        append_overlay_rows(mc, "mzi", 1.0, rep);
        res.tables.push_back(std::move(mc));
    }
    return res;
}

ExperimentResult fig4(const ExperimentSpec& spec) {
    const ProcessParams p = process_of(spec);
    const double flux = spec.param("photon_flux");
    const auto nli = InterferometerConfig::nli(spec.param("gain_sq"), flux);
    const auto mzi = InterferometerConfig::mzi(flux);
    const auto xs = linspace(spec.param("lambda_eps_min"), spec.param("lambda_eps_max"),
                             count(spec, "sweep_points"));

    Table t{"fig4_epsilon_sweep", {"lambda_epsilon", "epsilon", "nli_mse", "mzi_mse"}, {}};
    t.rows.resize(xs.size());
    parallel_for(
        xs.size(),
        [&](std::size_t i) {
            const double eps = xs[i] / p.lambda();
            t.rows[i] = {xs[i], eps, offset_mse(nli, p, eps).xi, offset_mse(mzi, p, eps).xi};
        },
        spec.workers);

    const double nli_track = tracking_mse(nli, p);
    const double mzi_track = tracking_mse(mzi, p);
    const double nli_floor = smoothing_floor_mse(nli, p);
    const double mzi_floor = smoothing_floor_mse(mzi, p);
    ExperimentResult res;
    res.summary = {{"prior_variance", p.stationary_variance()},
                   {"nli_tracking_mse", nli_track},
                   {"mzi_tracking_mse", mzi_track},
                   {"nli_smoothing_floor", nli_floor},
                   {"mzi_smoothing_floor", mzi_floor},
                   {"nli_tracking_to_floor_ratio", nli_track / nli_floor},
                   {"mzi_tracking_to_floor_ratio", mzi_track / mzi_floor}};
    res.tables.push_back(std::move(t));

    if (spec.replicas > 0) {
        Table mc{"fig4_montecarlo", kMcColumns, {}};
        const auto mx = linspace(spec.param("lambda_eps_min"), spec.param("lambda_eps_max"),
                                 count(spec, "mc_points"));
        std::vector<double> eps;
        for (double x : mx) eps.push_back(x / p.lambda());
        const std::array<std::pair<const char*, InterferometerConfig>, 2> insts{
            std::pair{"nli", nli}, std::pair{"mzi", mzi}};
        for (std::size_t k = 0; k < insts.size(); ++k) {
            const auto rep = run_overlay(spec, {insts[k].second, p, eps}, point_seed(spec.seed, 4, k));
            for (std::size_t i = 0; i < rep.offsets.size(); ++i) {
                const auto& o = rep.offsets[i];
                mc.rows.push_back({std::string(insts[k].first), mx[i], o.epsilon, o.analytic_mse,
                                   o.empirical_mse, o.standard_error, o.n_effective, o.z_score()});
            }
        }
        res.tables.push_back(std::move(mc));
    }
    return res;
}

ExperimentResult fig5(const ExperimentSpec& spec) {
    const ProcessParams p = process_of(spec);
    const auto fluxes = logspace(spec.param("flux_min"), spec.param("flux_max"),
                                 count(spec, "sweep_points"));
    std::vector<ScalingPoint> pts(fluxes.size());
    parallel_for(
        fluxes.size(), [&](std::size_t i) { pts[i] = scaling_point(p, fluxes[i]); }, spec.workers);

    Table t{"fig5_scaling",
            {"photon_flux", "optimal_gain_sq", "nli_smoothing_mse", "nli_tracking_mse",
             "mzi_smoothing_mse", "classical_limit", "canonical_bound", "heisenberg_asymptote"},
            {}};
    std::vector<double> nli, mzi;
    for (const auto& s : pts) {
        t.rows.push_back({s.photon_flux, s.optimal_gain_sq, s.smoothing_mse, s.tracking_mse,
                          s.mzi_smoothing_mse, s.references.classical, s.references.canonical,
                          s.references.heisenberg});
        nli.push_back(s.smoothing_mse);
        mzi.push_back(s.mzi_smoothing_mse);
    }

    ExperimentResult res;
    res.summary = {{"gain_policy", "re-optimized per point (smoothing floor)"}};
    if (fluxes.size() > 1) {
        res.summary.emplace_back("nli_loglog_slope", loglog_slope(fluxes, nli));
        res.summary.emplace_back("mzi_loglog_slope", loglog_slope(fluxes, mzi));
    }
    res.tables.push_back(std::move(t));

    if (spec.replicas > 0) {
        Table mc{"fig5_montecarlo", kMcColumns, {}};
        const auto mf = logspace(spec.param("flux_min"), spec.param("flux_max"),
                                 count(spec, "mc_points"));
        for (std::size_t i = 0; i < mf.size(); ++i) {
            const ScalingPoint s = scaling_point(p, mf[i]);
            const auto nli_cfg = InterferometerConfig::nli(s.optimal_gain_sq, mf[i]);
            const auto mzi_cfg = InterferometerConfig::mzi(mf[i]);
            // a lag of 10 filter time constants sits on the smoothing floor
            const double nli_lag = -10.0 / observation_spectrum(nli_cfg, p).cutoff();
            const double mzi_lag = -10.0 / observation_spectrum(mzi_cfg, p).cutoff();
            append_overlay_rows(mc, "nli", mf[i],
                                run_overlay(spec, {nli_cfg, p, {nli_lag}}, point_seed(spec.seed, 5, 2 * i)));
            append_overlay_rows(mc, "mzi", mf[i],
                                run_overlay(spec, {mzi_cfg, p, {mzi_lag}}, point_seed(spec.seed, 5, 2 * i + 1)));
        }
        res.tables.push_back(std::move(mc));
    }
    return res;
}

struct CustomPoint {
    ProcessParams process;
    InterferometerConfig instrument;
    double epsilon;
};

CustomPoint custom_point(const ExperimentSpec& spec, double value) {
    double kappa = spec.param("kappa"), lam = spec.param("lambda");
    double flux = spec.param("photon_flux"), gain = spec.param("gain_sq");
    double eps = spec.param("epsilon");
    const std::string& key = spec.sweep_key;
    if (key == "kappa") kappa = value;
    if (key == "lambda") lam = value;
    if (key == "photon_flux") flux = value;
    if (key == "gain_sq") gain = value;
    if (key == "lambda_epsilon") eps = value / lam;
    const auto inst = spec.kind == InstrumentKind::nli ? InterferometerConfig::nli(gain, flux)
                                                       : InterferometerConfig::mzi(flux);
    return {ProcessParams(kappa, lam), inst, eps};
}

ExperimentResult custom(const ExperimentSpec& spec) {
    const std::size_t n = count(spec, "sweep_points");
    const double lo = spec.param("sweep_min"), hi = spec.param("sweep_max");
    const auto values = spec.log_scale ? logspace(lo, hi, n) : linspace(lo, hi, n);

    Table t{"custom_sweep",
            {spec.sweep_key, "epsilon", "tracking_mse", "offset_mse", "smoothing_floor_mse", "snr"},
            {}};
    t.rows.resize(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            const CustomPoint cp = custom_point(spec, values[i]);
            t.rows[i] = {values[i],
                         cp.epsilon,
                         tracking_mse(cp.instrument, cp.process),
                         offset_mse(cp.instrument, cp.process, cp.epsilon).xi,
                         smoothing_floor_mse(cp.instrument, cp.process),
                         photocurrent_model(cp.instrument, cp.process).snr()};
        },
        spec.workers);

    ExperimentResult res;
    res.summary = {{"instrument", std::string(to_string(spec.kind))}};
    res.tables.push_back(std::move(t));

    if (spec.replicas > 0) {
        Table mc{"custom_montecarlo", kMcColumns, {}};
        const auto mv = spec.log_scale ? logspace(lo, hi, count(spec, "mc_points"))
                                       : linspace(lo, hi, count(spec, "mc_points"));
        for (std::size_t i = 0; i < mv.size(); ++i) {
            const CustomPoint cp = custom_point(spec, mv[i]);
            append_overlay_rows(mc, to_string(spec.kind), mv[i],
                                run_overlay(spec, {cp.instrument, cp.process, {cp.epsilon}},
                                            point_seed(spec.seed, 6, i)));
        }
        res.tables.push_back(std::move(mc));
    }
    return res;
}

std::string cell_text(const Cell& c, std::string_view column) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    const double x = std::get<double>(c);
    if (!std::isfinite(x))
        throw std::runtime_error(fmt::format("non-finite value in column '{}'", column));
    return fmt_num(x);
}

std::vector<std::pair<std::string, std::string>> settings_of(const ExperimentSpec& spec) {
    std::vector<std::pair<std::string, std::string>> s;
    s.emplace_back("preset", std::string(to_string(spec.preset)));
    if (spec.preset == Preset::custom) {
        s.emplace_back("kind", std::string(to_string(spec.kind)));
        s.emplace_back("sweep_key", spec.sweep_key);
        s.emplace_back("sweep_scale", spec.log_scale ? "log" : "linear");
    }
    if (spec.preset != Preset::fig2_snr_surface) s.emplace_back("fidelity", to_string(spec.fidelity));
    s.emplace_back("seed", std::to_string(spec.seed));
    return s;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace

std::optional<Preset> parse_preset(std::string_view name) {
    const std::string n = lower(name);
    for (Preset p : all_presets()) {
        const std::string_view full = to_string(p);
        if (n == full || n == full.substr(0, full.find('-'))) return p;
    }
    return std::nullopt;
}

std::string_view to_string(Preset preset) {
    switch (preset) {
        case Preset::fig2_snr_surface: return "fig2-snr-surface";
        case Preset::fig3_gain_sweep: return "fig3-gain-sweep";
        case Preset::fig4_epsilon_sweep: return "fig4-epsilon-sweep";
        case Preset::fig5_scaling: return "fig5-scaling";
        case Preset::custom: return "custom";
    }
    return "unknown";
}

std::vector<Preset> all_presets() {
    return {Preset::fig2_snr_surface, Preset::fig3_gain_sweep, Preset::fig4_epsilon_sweep,
            Preset::fig5_scaling, Preset::custom};
}

std::vector<KeyInfo> describe_keys(Preset preset) {
    std::vector<KeyInfo> out;
    const auto defaults = preset_defaults(preset, "gain_sq");
    for (const auto& k : kNumericKeys) {
        if (!(k.presets & preset_bit(preset))) continue;
        out.push_back({k.key, fmt_num(defaults.at(k.key)), range_text(k), k.help});
    }
    for (const auto& k : kTextKeys) {
        if (!(k.presets & preset_bit(preset))) continue;
        std::string def;
        const std::string_view key = k.key;
        if (key == "kind") def = "nli";
        else if (key == "fidelity") def = "linearized";
        else if (key == "sweep_key") def = "gain_sq";
        else if (key == "sweep_scale") def = "linear (log for photon_flux, kappa, lambda)";
        else if (key == "seed") def = "0";
        else if (key == "out") def = ".";
        else if (key == "format") def = "csv";
        else if (key == "timestamp") def = "false";
        out.push_back({k.key, def, k.range, k.help});
    }
    return out;
}

bool parse_formats(std::string_view text, bool& csv, bool& json) {
    csv = json = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string item = lower(text.substr(start, end - start));
        if (item == "csv") csv = true;
        else if (item == "json") json = true;
        else if (!item.empty()) return false;
        start = end + 1;
    }
    return csv || json;
}

std::variant<ExperimentSpec, std::vector<ConfigError>> validate_config(const RawConfig& raw) {
    std::vector<ConfigError> errors;
    ExperimentSpec spec;

    const auto preset_it = raw.find("preset");
    if (preset_it == raw.end()) {
        errors.push_back({"preset", "preset: required (fig2-snr-surface|fig3-gain-sweep|"
                                    "fig4-epsilon-sweep|fig5-scaling|custom)"});
    } else if (const auto p = parse_preset(preset_it->second)) {
        spec.preset = *p;
    } else {
        errors.push_back({"preset", fmt::format("preset: unknown value '{}' (expected fig2-snr-"
                                                "surface|fig3-gain-sweep|fig4-epsilon-sweep|"
                                                "fig5-scaling|custom)",
                                                preset_it->second)});
    }
    const unsigned bit = preset_bit(spec.preset);

    if (const auto it = raw.find("sweep_key"); it != raw.end()) spec.sweep_key = lower(it->second);
    spec.params = preset_defaults(spec.preset, spec.sweep_key);
    spec.log_scale = custom_sweep_defaults(spec.sweep_key).log;

    auto not_used = [&](const std::string& key) {
        errors.push_back({key, fmt::format("{}: not used by preset {}", key, to_string(spec.preset))});
    };

    for (const auto& [key, value] : raw) {
        if (key == "preset") continue;
        if (const NumericKey* nk = find_numeric(key)) {
            const auto v = parse_double(value);
            if (!v || !std::isfinite(*v)) {
                errors.push_back({key, fmt::format("{}: expected a finite number ({}), got '{}'",
                                                   key, range_text(*nk), value)});
                continue;
            }
            const bool below = nk->lower_open ? !(*v > nk->lower) : !(*v >= nk->lower);
            const bool above = nk->upper_open ? !(*v < nk->upper) : !(*v <= nk->upper);
            const bool fractional = nk->integer && std::floor(*v) != *v;
            if (below || above || fractional) {
                std::string why = key == std::string_view("gain_sq")
                                      ? " (the NLI needs G² > 1)"
                                      : "";
                errors.push_back({key, fmt::format("{}: must be {}{}, got {}", key, range_text(*nk),
                                                   why, value)});
                continue;
            }
            if (!(nk->presets & bit)) {
                not_used(key);
                continue;
            }
            spec.params[key] = *v;
            continue;
        }
        const TextKey* tk = find_text(key);
        if (!tk) {
            errors.push_back({key, fmt::format("{}: unknown key", key)});
            continue;
        }
        if (!(tk->presets & bit)) {
            not_used(key);
            continue;
        }
        const std::string v = lower(value);
        auto bad = [&] {
            errors.push_back({key, fmt::format("{}: must be one of {}, got '{}'", key, tk->range, value)});
        };
        if (key == "kind") {
            if (v == "nli") spec.kind = InstrumentKind::nli;
            else if (v == "mzi") spec.kind = InstrumentKind::mzi;
            else bad();
        } else if (key == "fidelity") {
            if (v == "linearized" || v == "linear") spec.fidelity = ModelFidelity::linearized;
            else if (v == "exact" || v == "exact-homodyne") spec.fidelity = ModelFidelity::exact_homodyne;
            else bad();
        } else if (key == "sweep_key") {
            if (v != "gain_sq" && v != "photon_flux" && v != "lambda_epsilon" && v != "kappa" &&
                v != "lambda")
                bad();
        } else if (key == "sweep_scale") {
            if (v == "linear" || v == "lin") spec.log_scale = false;
            else if (v == "log") spec.log_scale = true;
            else bad();
        } else if (key == "seed") {
            std::uint64_t s = 0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), s);
            if (res.ec != std::errc() || res.ptr != value.data() + value.size()) bad();
            else spec.seed = s;
        } else if (key == "out") {
            if (value.empty()) bad();
            else spec.output_dir = value;
        } else if (key == "format") {
            if (!parse_formats(value, spec.write_csv, spec.write_json)) bad();
        } else if (key == "timestamp") {
            if (const auto b = parse_bool(value)) spec.timestamp = *b;
            else bad();
        }
    }

    if (!errors.empty()) return errors;

    auto& P = spec.params;
    auto require = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) errors.push_back({key, fmt::format("{}: {}", key, msg)});
    };
    if (P.count("gain_min") && P.count("gain_max"))
        require(P["gain_max"] > P["gain_min"], "gain_max",
                fmt::format("must be > gain_min ({})", fmt_num(P["gain_min"])));
    if (P.count("lambda_eps_min"))
        require(P["lambda_eps_max"] > P["lambda_eps_min"], "lambda_eps_max",
                fmt::format("must be > lambda_eps_min ({})", fmt_num(P["lambda_eps_min"])));
    if (P.count("flux_min"))
        require(P["flux_max"] >= P["flux_min"], "flux_max",
                fmt::format("must be >= flux_min ({})", fmt_num(P["flux_min"])));
    if (spec.preset == Preset::custom) {
        const double lo = P["sweep_min"], hi = P["sweep_max"];
        require(hi >= lo, "sweep_max", fmt::format("must be >= sweep_min ({})", fmt_num(lo)));
        if (spec.log_scale) require(lo > 0.0, "sweep_min", "must be > 0 for a log sweep");
        if (spec.sweep_key == "gain_sq" && spec.kind == InstrumentKind::nli)
            require(lo > 1.0 && hi <= 1e4, "sweep_min",
                    "gain_sq sweep must stay in (1, 10000] (the NLI needs G² > 1)");
        if (spec.sweep_key == "photon_flux" || spec.sweep_key == "kappa" || spec.sweep_key == "lambda")
            require(lo > 0.0, "sweep_min", fmt::format("{} sweep must stay > 0", spec.sweep_key));
    }
    if (P.count("replicas")) {
        spec.replicas = static_cast<int>(P["replicas"]);
        if (spec.replicas > 0)
            require(P["mc_duration"] * P["lambda"] >= 100.0, "mc_duration",
                    fmt::format("must be >= 100/lambda = {} s", fmt_num(100.0 / P["lambda"])));
    }
    spec.workers = static_cast<unsigned>(P["workers"]);

    if (!errors.empty()) return errors;
    return spec;
}

ExperimentResult compute_experiment(const ExperimentSpec& spec) {
    switch (spec.preset) {
        case Preset::fig2_snr_surface: return fig2(spec);
        case Preset::fig3_gain_sweep: return fig3(spec);
        case Preset::fig4_epsilon_sweep: return fig4(spec);
        case Preset::fig5_scaling: return fig5(spec);
        case Preset::custom: return custom(spec);
    }
    throw std::logic_error("unknown preset");
}

std::string render_csv(const ExperimentSpec& spec, const ExperimentResult& result,
                       const Table& table) {
    fmt::memory_buffer out;
    auto line = [&](std::string_view k, std::string_view v) {
        fmt::format_to(std::back_inserter(out), "# {}: {}\n", k, v);
    };
    line("table", table.name);
    for (const auto& [k, v] : settings_of(spec)) line(k, v);
    for (const auto& [k, v] : spec.params) line("param." + k, fmt_num(v));
    for (const auto& [k, v] : result.summary) line("summary." + k, cell_text(v, k));
    for (const auto& [k, v] : build_versions()) line("version." + k, v);
    if (spec.timestamp) line("generated", timestamp_now());

    for (std::size_t c = 0; c < table.columns.size(); ++c)
        fmt::format_to(std::back_inserter(out), "{}{}", c ? "," : "", table.columns[c]);
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            fmt::format_to(std::back_inserter(out), "{}{}", c ? "," : "",
                           cell_text(row[c], table.columns[c]));
        out.push_back('\n');
    }
    return fmt::to_string(out);
}

std::string render_json(const ExperimentSpec& spec, const ExperimentResult& result) {
    using json = nlohmann::ordered_json;
    json doc;
    for (const auto& [k, v] : settings_of(spec)) doc[k] = v;
    json params = json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    doc["parameters"] = params;
    json summary = json::object();
    for (const auto& [k, v] : result.summary) {
        if (const auto* s = std::get_if<std::string>(&v)) summary[k] = *s;
        else summary[k] = std::get<double>(v);
    }
    doc["summary"] = summary;
    json versions = json::object();
    for (const auto& [k, v] : build_versions()) versions[k] = v;
    doc["versions"] = versions;
    if (spec.timestamp) doc["generated"] = timestamp_now();

    json tables = json::object();
    for (const auto& t : result.tables) {
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r = json::array();
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (const auto* s = std::get_if<std::string>(&row[c])) {
                    r.push_back(*s);
                } else {
                    const double x = std::get<double>(row[c]);
                    if (!std::isfinite(x))
                        throw std::runtime_error(fmt::format("non-finite value in column '{}'", t.columns[c]));
                    r.push_back(x);
                }
            }
            rows.push_back(std::move(r));
        }
        tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
    }
    doc["tables"] = std::move(tables);
    return doc.dump(2) + "\n";
}

RunOutcome run_experiment(const ExperimentSpec& spec) {
    RunOutcome outcome;
    std::vector<std::pair<std::filesystem::path, std::string>> artifacts;
    try {
        const ExperimentResult result = compute_experiment(spec);
        if (spec.write_csv)
            for (const auto& t : result.tables)
                artifacts.emplace_back(spec.output_dir / (t.name + ".csv"), render_csv(spec, result, t));
        if (spec.write_json) {
            std::string stem(to_string(spec.preset));
            std::replace(stem.begin(), stem.end(), '-', '_');
            artifacts.emplace_back(spec.output_dir / (stem + ".json"), render_json(spec, result));
        }
    } catch (const std::invalid_argument& e) {
        outcome.exit_code = exit_invalid;
        outcome.message = e.what();
        return outcome;
    } catch (const std::exception& e) {
        outcome.exit_code = exit_failure;
        outcome.message = e.what();
        return outcome;
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec) {
        outcome.exit_code = exit_failure;
        outcome.message = fmt::format("cannot create output directory '{}': {}",
                                      spec.output_dir.string(), ec.message());
        return outcome;
    }
    for (const auto& [path, text] : artifacts) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << text;
        f.close();
        if (!f) {
            for (const auto& written : outcome.files) std::filesystem::remove(written, ec);
            std::filesystem::remove(path, ec);
            outcome.files.clear();
            outcome.exit_code = exit_failure;
            outcome.message = fmt::format("cannot write '{}'", path.string());
            return outcome;
        }
        outcome.files.push_back(path);
    }
    return outcome;
}

}  // namespace phasetrack::sweep
