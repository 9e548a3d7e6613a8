// phasetrack: run experiment presets and write plot-ready tables.
//
//   phasetrack run fig3 --out results
//   phasetrack run custom --set sweep_key=photon_flux --set kind=mzi
//   phasetrack run fig4 --config run.ini --replicas 4 --format csv,json
//   phasetrack keys fig5
#include "phasetrack/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>

#include <cstdio>
#include <string>
#include <vector>

namespace ps = phasetrack::sweep;

namespace {

// Flattens an INI/TOML file into key -> value; section names are ignored.
bool load_config_file(const std::string& path, ps::RawConfig& raw) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::Error& e) {
        fmt::print(stderr, "config: cannot read '{}': {}\n", path, e.what());
        return false;
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--" || item.inputs.empty()) continue;
        std::string value;
        for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
        if (item.name == "set") {
            for (const auto& kv : item.inputs) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    fmt::print(stderr, "config: 'set' entry '{}' is not key=value\n", kv);
                    return false;
                }
                raw[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            continue;
        }
        raw[item.name] = value;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal phase estimation experiments: tracking, prediction and smoothing of an "
                 "Ornstein-Uhlenbeck phase with NLI and MZI probes."};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset and write its tables");
    std::string preset;
    std::vector<std::string> sets;
    std::string out, format, fidelity, config_path;
    std::uint64_t seed = 0;
    int replicas = 0;
    bool timestamp = false;
    run->add_option("preset", preset, "fig2|fig3|fig4|fig5|custom (or the full preset name)")
        ->required();
    run->add_option("--set", sets, "Parameter override key=value (repeatable)");
    auto* out_opt = run->add_option("--out", out, "Output directory");
    auto* seed_opt = run->add_option("--seed", seed, "Base random seed");
    auto* rep_opt = run->add_option("--replicas", replicas, "Monte Carlo replicas per overlay point");
    auto* fmt_opt = run->add_option("--format", format, "csv, json or csv,json");
    auto* fid_opt = run->add_option("--fidelity", fidelity, "linearized|exact");
    run->add_option("--config", config_path, "Key-value file (INI/TOML); flags override it")
        ->check(CLI::ExistingFile);
    auto* ts_opt = run->add_flag("--timestamp", timestamp, "Stamp the generation time in headers");

    auto* keys = app.add_subcommand("keys", "List the keys a preset accepts");
    std::string keys_preset;
    keys->add_option("preset", keys_preset, "Preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ps::exit_ok : ps::exit_invalid;
    }

    if (*keys) {
        const auto p = ps::parse_preset(keys_preset);
        if (!p) {
            fmt::print(stderr, "unknown preset '{}'\n", keys_preset);
            return ps::exit_invalid;
        }
        const auto rows = ps::describe_keys(*p);
        std::size_t wk = 3, wd = 7, wr = 5;
        for (const auto& k : rows) {
            wk = std::max(wk, k.key.size());
            wd = std::max(wd, k.default_value.size());
            wr = std::max(wr, k.range.size());
        }
        fmt::print("{:<{}}  {:<{}}  {:<{}}  {}\n", "key", wk, "default", wd, "range", wr, "meaning");
        for (const auto& k : rows)
            fmt::print("{:<{}}  {:<{}}  {:<{}}  {}\n", k.key, wk, k.default_value, wd, k.range, wr, k.help);
        return ps::exit_ok;
    }

    ps::RawConfig raw;
    if (!config_path.empty() && !load_config_file(config_path, raw)) return ps::exit_invalid;
    raw["preset"] = preset;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            fmt::print(stderr, "--set: expected key=value, got '{}'\n", kv);
            return ps::exit_invalid;
        }
        raw[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (*out_opt) raw["out"] = out;
    if (*seed_opt) raw["seed"] = std::to_string(seed);
    if (*rep_opt) raw["replicas"] = std::to_string(replicas);
    if (*fmt_opt) raw["format"] = format;
    if (*fid_opt) raw["fidelity"] = fidelity;
    if (*ts_opt) raw["timestamp"] = timestamp ? "true" : "false";

    auto validated = ps::validate_config(raw);
    if (auto* errors = std::get_if<std::vector<ps::ConfigError>>(&validated)) {
        for (const auto& e : *errors) fmt::print(stderr, "invalid configuration: {}\n", e.message);
        return ps::exit_invalid;
    }
    const auto& spec = std::get<ps::ExperimentSpec>(validated);
    const auto outcome = ps::run_experiment(spec);
    if (outcome.exit_code != ps::exit_ok) {
        fmt::print(stderr, "{}: {}\n", ps::to_string(spec.preset), outcome.message);
        return outcome.exit_code;
    }
    for (const auto& f : outcome.files) fmt::print("wrote {}\n", f.string());
    return ps::exit_ok;
}
