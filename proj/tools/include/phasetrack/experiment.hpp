// Experiment presets, key-value configuration and table emission for the
// phasetrack command-line tool.
#pragma once

#include "phasetrack/interferometer.hpp"
#include "phasetrack/montecarlo.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phasetrack::sweep {

enum class Preset { fig2_snr_surface, fig3_gain_sweep, fig4_epsilon_sweep, fig5_scaling, custom };

/// Accepts the full name ("fig3-gain-sweep") or the short one ("fig3").
std::optional<Preset> parse_preset(std::string_view name);
std::string_view to_string(Preset preset);
std::vector<Preset> all_presets();

/// Raw configuration document: key -> text value, as read from a config
/// file and command-line flags. "preset" selects the experiment.
using RawConfig = std::map<std::string, std::string>;

struct ConfigError {
    std::string key;
    std::string message;  ///< names the key and its admissible range
};

struct ExperimentSpec {
    Preset preset = Preset::custom;
    /// Every numeric parameter of the preset, defaults filled in.
    std::map<std::string, double> params;
    InstrumentKind kind = InstrumentKind::nli;
    ModelFidelity fidelity = ModelFidelity::linearized;
    std::string sweep_key = "gain_sq";
    bool log_scale = false;
    std::filesystem::path output_dir = ".";
    bool write_csv = true;
    bool write_json = false;
    std::uint64_t seed = 0;
    int replicas = 0;
    unsigned workers = 0;
    bool timestamp = false;

    double param(const std::string& key) const { return params.at(key); }
};

/// Keys accepted for a preset, with their default text and admissible range.
struct KeyInfo {
    std::string key;
    std::string default_value;
    std::string range;
    std::string help;
};
std::vector<KeyInfo> describe_keys(Preset preset);

/// Either a fully populated spec or every problem found in @p raw.
std::variant<ExperimentSpec, std::vector<ConfigError>> validate_config(const RawConfig& raw);

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;  ///< file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Everything a preset produces, before serialization.
struct ExperimentResult {
    std::vector<Table> tables;
    std::vector<std::pair<std::string, Cell>> summary;
};

/// Computes the preset's tables. Throws on numerical failure.
ExperimentResult compute_experiment(const ExperimentSpec& spec);

/// CSV text of one table with its commented metadata header.
std::string render_csv(const ExperimentSpec& spec, const ExperimentResult& result,
                       const Table& table);
/// JSON sidecar mirroring the metadata, summary and all tables.
std::string render_json(const ExperimentSpec& spec, const ExperimentResult& result);

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_failure = 2 };

struct RunOutcome {
    int exit_code = exit_ok;
    std::vector<std::filesystem::path> files;
    std::string message;
};

/// Computes and writes all artifacts. Nothing is written unless every table
/// was computed and rendered successfully.
RunOutcome run_experiment(const ExperimentSpec& spec);

/// Parses "a,b" format lists; returns false on an unknown entry.
bool parse_formats(std::string_view text, bool& csv, bool& json);

}  // namespace phasetrack::sweep
