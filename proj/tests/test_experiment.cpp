#include "phasetrack/experiment.hpp"
#include "phasetrack/interferometer.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace phasetrack;
using namespace phasetrack::sweep;
namespace fs = std::filesystem;

namespace {

ExperimentSpec spec_of(const RawConfig& raw) {
    auto v = validate_config(raw);
    if (auto* errs = std::get_if<std::vector<ConfigError>>(&v)) {
        std::string all;
        for (const auto& e : *errs) all += e.message + "\n";
        ADD_FAILURE() << all;
        return {};
    }
    return std::get<ExperimentSpec>(v);
}

std::vector<ConfigError> errors_of(const RawConfig& raw) {
    auto v = validate_config(raw);
    if (auto* errs = std::get_if<std::vector<ConfigError>>(&v)) return *errs;
    return {};
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("phasetrack_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const Cell* summary_value(const ExperimentResult& r, const std::string& key) {
    for (const auto& [k, v] : r.summary)
        if (k == key) return &v;
    return nullptr;
}

}  // namespace

TEST(Presets, NamesRoundTrip) {
    for (Preset p : all_presets()) EXPECT_EQ(parse_preset(to_string(p)), p);
    EXPECT_EQ(parse_preset("fig3"), Preset::fig3_gain_sweep);
    EXPECT_FALSE(parse_preset("fig6").has_value());
}

TEST(ValidateConfig, NegativeKappaNamesKeyAndRange) {
    const auto errs = errors_of({{"preset", "fig3-gain-sweep"}, {"kappa", "-1"}});
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].key, "kappa");
    EXPECT_NE(errs[0].message.find("kappa"), std::string::npos);
    EXPECT_NE(errs[0].message.find("> 0"), std::string::npos);
}

TEST(ValidateConfig, Fig5DefaultsFullyPopulated) {
    const auto spec = spec_of({{"preset", "fig5-scaling"}});
    EXPECT_EQ(spec.preset, Preset::fig5_scaling);
    EXPECT_EQ(spec.param("kappa"), 1e4);
    EXPECT_EQ(spec.param("lambda"), 1e5);
    EXPECT_EQ(spec.param("flux_min"), 1e9);
    EXPECT_EQ(spec.param("flux_max"), 1e10);
    EXPECT_EQ(spec.param("sweep_points"), 21);
    EXPECT_EQ(spec.replicas, 0);
    for (const auto& k : describe_keys(Preset::fig5_scaling)) {
        if (k.key == "kind" || k.key == "fidelity" || k.key == "seed" || k.key == "out" ||
            k.key == "format" || k.key == "timestamp" || k.key == "sweep_key" ||
            k.key == "sweep_scale")
            continue;
        EXPECT_TRUE(spec.params.count(k.key)) << k.key;
    }
}

TEST(ValidateConfig, Fig3And4Defaults) {
    const auto f3 = spec_of({{"preset", "fig3"}});
    EXPECT_EQ(f3.param("photon_flux"), 1e7);
    EXPECT_EQ(f3.param("gain_min"), 1.1);
    EXPECT_EQ(f3.param("gain_max"), 50.0);
    const auto f4 = spec_of({{"preset", "fig4"}});
    EXPECT_EQ(f4.param("gain_sq"), 7.4);
    EXPECT_EQ(f4.param("sweep_points"), 201);
}

TEST(ValidateConfig, UnitGainRejectedForNli) {
    const auto errs = errors_of({{"preset", "custom"}, {"gain_sq", "1.0"}, {"kind", "NLI"}});
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].key, "gain_sq");
    EXPECT_NE(errs[0].message.find("G² > 1"), std::string::npos) << errs[0].message;
}

TEST(ValidateConfig, UnknownAndUnusedKeysRejected) {
    auto errs = errors_of({{"preset", "fig3"}, {"kapa", "1"}});
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].key, "kapa");
    errs = errors_of({{"preset", "fig3"}, {"epsilon", "1e-6"}});
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].key, "epsilon");
}

TEST(ValidateConfig, ErrorsAreAggregated) {
    const auto errs = errors_of({{"preset", "custom"}, {"kappa", "0"}, {"lambda", "abc"},
                                 {"photon_flux", "-3"}, {"seed", "x"}});
    EXPECT_EQ(errs.size(), 4u);
    EXPECT_FALSE(errors_of({{"kappa", "1"}}).empty());  // no preset
}

TEST(ValidateConfig, ZeroPointSweepRejected) {
    const auto errs = errors_of({{"preset", "custom"}, {"sweep_points", "0"}});
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].key, "sweep_points");
}

TEST(RunExperiment, EmptySweepWritesNothing) {
    auto spec = spec_of({{"preset", "custom"}});
    spec.params["sweep_points"] = 0;  // bypasses validate_config on purpose
    spec.output_dir = scratch_dir("empty");
    const auto out = run_experiment(spec);
    EXPECT_EQ(out.exit_code, exit_invalid);
    EXPECT_TRUE(out.files.empty());
    EXPECT_FALSE(fs::exists(spec.output_dir));
}

TEST(RunExperiment, UnwritableDirectoryIsRuntimeFailure) {
    const auto base = scratch_dir("blocked");
    fs::create_directories(base);
    std::ofstream(base / "file") << "x";
    auto spec = spec_of({{"preset", "fig4"}, {"sweep_points", "5"}});
    spec.output_dir = base / "file" / "sub";
    const auto out = run_experiment(spec);
    EXPECT_EQ(out.exit_code, exit_failure);
    EXPECT_TRUE(out.files.empty());
    fs::remove_all(base);
}

TEST(Fig2, SurfaceMatchesClosedFormAtEveryNode) {
    auto spec = spec_of({{"preset", "fig2"}, {"grid_points", "40"}});
    const auto res = compute_experiment(spec);
    ASSERT_EQ(res.tables.size(), 2u);
    const auto& surface = res.tables[0];
    ASSERT_EQ(surface.rows.size(), 40u * 40u);
    for (const auto& row : surface.rows) {
        const double g = std::get<double>(row[0]), s = std::get<double>(row[1]);
        // independent evaluation: 4A/((2G²-1)(2Aσ+1)), A = G²(G²-1)
        const double a = g * (g - 1);
        const double expected = 4 * a / (2 * g - 1) / (2 * a * s + 1);
        EXPECT_NEAR(std::get<double>(row[2]), expected, 1e-12 * expected);
    }
    for (const auto& row : res.tables[1].rows) {
        EXPECT_NEAR(snr_ratio(std::get<double>(row[0]), std::get<double>(row[1])), 1.0, 1e-9);
    }
}

TEST(Fig2, SnrRatioIndependentFormula) {
    // SNR_NLI / SNR_MZI = 4A|α|² / ((2Aσ+1)|β|²) with |α|² = |β|²/(2G²-1)
    for (double g : {1.5, 2.0, 7.4, 30.0})
        for (double s : {0.0, 0.01, 0.1}) {
            const double a = g * (g - 1);
            EXPECT_NEAR(snr_ratio(g, s), 4 * a / (2 * g - 1) / (2 * a * s + 1), 1e-12);
        }
}

TEST(Fig3, MinimumAtExpectedGain) {
    const auto res = compute_experiment(spec_of({{"preset", "fig3"}}));
    const double g = std::get<double>(*summary_value(res, "grid_minimum_gain_sq"));
    EXPECT_NEAR(g, 7.4, 0.1 + 1e-12);
    EXPECT_EQ(std::get<std::string>(*summary_value(res, "minimum_below_mzi")), "true");
    EXPECT_EQ(res.tables[0].rows.size(), 490u);
    EXPECT_EQ(std::get<double>(res.tables[0].rows[1][0]), 1.2);
}

TEST(Fig4, CurvesRiseTowardPriorVariance) {
    const auto res = compute_experiment(spec_of({{"preset", "fig4"}}));
    const auto& rows = res.tables[0].rows;
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_EQ(std::get<double>(rows.front()[0]), -1.0);
    EXPECT_EQ(std::get<double>(rows.back()[0]), 1.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GE(std::get<double>(rows[i][2]), std::get<double>(rows[i - 1][2]));
        EXPECT_LT(std::get<double>(rows[i][2]), std::get<double>(rows[i][3]));
    }
    EXPECT_LT(std::get<double>(rows.back()[2]), 0.05);
    EXPECT_GT(std::get<double>(rows.back()[2]), 0.04);
}

TEST(Output, RerunsAreByteIdentical) {
    for (Preset p : all_presets()) {
        RawConfig raw{{"preset", std::string(to_string(p))}, {"format", "csv,json"}};
        if (p == Preset::fig2_snr_surface) raw["grid_points"] = "30";
        if (p == Preset::fig3_gain_sweep) raw["gain_step"] = "1";
        const auto a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
        auto sa = spec_of(raw), sb = spec_of(raw);
        sa.output_dir = a;
        sb.output_dir = b;
        const auto oa = run_experiment(sa), ob = run_experiment(sb);
        ASSERT_EQ(oa.exit_code, exit_ok) << oa.message;
        ASSERT_EQ(ob.exit_code, exit_ok) << ob.message;
        ASSERT_EQ(oa.files.size(), ob.files.size());
        for (std::size_t i = 0; i < oa.files.size(); ++i) {
            EXPECT_EQ(oa.files[i].filename(), ob.files[i].filename());
            EXPECT_EQ(slurp(oa.files[i]), slurp(ob.files[i])) << oa.files[i];
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

TEST(Output, MetadataHeaderAndFiniteCells) {
    auto spec = spec_of({{"preset", "fig4"}, {"seed", "11"}});
    const auto res = compute_experiment(spec);
    const std::string csv = render_csv(spec, res, res.tables[0]);
    EXPECT_EQ(csv.rfind("# ", 0), 0u);
    EXPECT_NE(csv.find("# param.kappa: 10000"), std::string::npos);
    EXPECT_NE(csv.find("# seed: 11"), std::string::npos);
    EXPECT_NE(csv.find("# version.phasetrack:"), std::string::npos);
    EXPECT_EQ(csv.find("generated"), std::string::npos);
    EXPECT_NE(csv.find("\nlambda_epsilon,epsilon,nli_mse,mzi_mse\n"), std::string::npos);

    std::istringstream in(csv);
    std::string line;
    std::size_t body = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) EXPECT_TRUE(std::isfinite(std::stod(cell))) << line;
        ++body;
    }
    EXPECT_EQ(body, 201u);

    spec.timestamp = true;
    EXPECT_NE(render_csv(spec, res, res.tables[0]).find("# generated:"), std::string::npos);
}

TEST(Output, NonFiniteCellsRefused) {
    auto spec = spec_of({{"preset", "fig4"}, {"sweep_points", "3"}});
    auto res = compute_experiment(spec);
    res.tables[0].rows[1][2] = std::nan("");
    EXPECT_ANY_THROW(render_csv(spec, res, res.tables[0]));
}

TEST(Output, JsonSidecarParses) {
    auto spec = spec_of({{"preset", "fig3"}, {"gain_step", "0.5"}});
    const auto res = compute_experiment(spec);
    const auto doc = nlohmann::json::parse(render_json(spec, res));
    EXPECT_EQ(doc["preset"], "fig3-gain-sweep");
    EXPECT_EQ(doc["parameters"]["photon_flux"], 1e7);
    ASSERT_TRUE(doc.contains("tables"));
    EXPECT_EQ(doc["tables"].size(), res.tables.size());
}

TEST(Output, FormatParsing) {
    bool csv = false, json = false;
    EXPECT_TRUE(parse_formats("csv,json", csv, json));
    EXPECT_TRUE(csv && json);
    EXPECT_TRUE(parse_formats("json", csv, json));
    EXPECT_TRUE(!csv && json);
    EXPECT_FALSE(parse_formats("csv,xml", csv, json));
}

TEST(Overlay, SmallMonteCarloTableIsDeterministic) {
    RawConfig raw{{"preset", "fig3"}, {"gain_step", "10"}, {"replicas", "1"},
                  {"mc_points", "2"},  {"mc_duration", "2e-3"}, {"seed", "3"}};
    const auto a = compute_experiment(spec_of(raw));
    const auto b = compute_experiment(spec_of(raw));
    ASSERT_EQ(a.tables.size(), 2u);
    EXPECT_EQ(a.tables[1].name, "fig3_montecarlo");
    auto sa = spec_of(raw);
    EXPECT_EQ(render_csv(sa, a, a.tables[1]), render_csv(sa, b, b.tables[1]));
}
