#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcgossip/engine.hpp"

namespace dcgossip::cli {

/// Flat `section.key=value` settings. Later entries override earlier ones.
using ConfigMap = std::map<std::string, std::string>;

/// Parses `key=value` lines. Blank lines and lines starting with '#' are skipped.
ConfigMap parse_config(std::istream& in);
ConfigMap load_config_file(const std::filesystem::path& path);

/// Turns trailing `--key=value` / `--key value` arguments into overrides.
ConfigMap parse_flag_overrides(const std::vector<std::string>& args);

/// `base` with every entry of `overrides` written over it.
ConfigMap merged(ConfigMap base, const ConfigMap& overrides);

enum class ReproTarget { fig_circular, fig_circular_directed, fig_random, fig_star, fig_chain };

ReproTarget parse_repro_target(std::string_view name);
std::string_view to_string(ReproTarget target);

/// 50-node reproduction preset, neighborhood_set rule, tolerance 1e-6, 400 iterations.
ConfigMap repro_preset(ReproTarget target);

/// Expands `run.repro_target` into its preset; explicit keys in `cfg` still win.
ConfigMap resolve_repro(const ConfigMap& cfg);

enum class Backend { agent, matrix, pairwise };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

/// chain, star, circular, circular_directed, random_geometric, complete.
std::vector<std::string> topology_labels();

struct RunSpec {
    std::string name;
    std::string topology_label;
    Backend backend = Backend::agent;
    RunConfig config;
    std::filesystem::path output_dir;
};

/// Builds the graph and run configuration. Throws ConfigError (or a TopologyError subtype).
RunSpec build_run_spec(const ConfigMap& cfg);

/// One sweep member; materialised into a RunSpec by the worker that executes it.
struct ExperimentRun {
    std::string name;
    std::string topology_label;
    std::string rule;
    std::uint64_t seed = 0;
    ConfigMap settings;
};

struct ExperimentSpec {
    std::string name;
    std::vector<ExperimentRun> runs;
    std::filesystem::path outputs;
    std::optional<ReproTarget> repro_target;

    /// Run names must be unique.
    void validate() const;
};

/// Cartesian product of sweep.topologies x sweep.rules x sweep.seeds over a base config.
ExperimentSpec build_experiment(const ConfigMap& cfg);

/// Seed list from "1-10", "1,4,9" or a mix; empty string gives no seeds.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

} // namespace dcgossip::cli
