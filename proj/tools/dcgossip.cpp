// Command-line entry point: run, sweep, compare, spectra.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcgossip/cli/commands.hpp"
#include "dcgossip/errors.hpp"

namespace {

using dcgossip::cli::ConfigMap;

ConfigMap load_with_overrides(const std::string& path, const std::vector<std::string>& extras) {
    ConfigMap cfg = path.empty() ? ConfigMap{} : dcgossip::cli::load_config_file(path);
    std::vector<std::string> flags;
    for (const auto& s : extras) flags.push_back(s);
    return dcgossip::cli::merged(std::move(cfg), dcgossip::cli::parse_flag_overrides(flags));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Duty-cycled gossip consensus simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> baseline_paths;
    std::string repro;

    auto* run = app.add_subcommand("run", "Run one simulation and write trace, metrics and spectral report");
    run->add_option("config", config_path, "key=value config file");
    run->add_option("--repro", repro, "Reproduction preset (fig_circular, fig_circular_directed, fig_random, "
                                      "fig_star, fig_chain)");
    run->allow_extras();

    auto* sweep = app.add_subcommand("sweep", "Run a topology x rule x seed sweep and write an aggregate CSV");
    sweep->add_option("config", config_path, "key=value config file")->required();
    sweep->allow_extras();

    auto* compare = app.add_subcommand("compare", "Compare the protocol against pairwise gossip");
    compare->add_option("config", config_path, "key=value config file")->required();
    compare->add_option("--baseline", baseline_paths, "Baseline config file (repeatable)");
    compare->allow_extras();

    auto* spectra = app.add_subcommand("spectra", "Spectral report for a topology without simulating");
    spectra->add_option("config", config_path, "key=value config file");
    spectra->allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dcgossip::cli::exit_config_error;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        ConfigMap cfg = load_with_overrides(config_path, active->remaining());
        if (!repro.empty()) cfg["run.repro_target"] = repro;

        if (active == run) return dcgossip::cli::cmd_run(cfg, std::cout, std::cerr);
        if (active == sweep) return dcgossip::cli::cmd_sweep(cfg, std::cout, std::cerr);
        if (active == spectra) return dcgossip::cli::cmd_spectra(cfg, std::cout, std::cerr);
        std::vector<ConfigMap> baselines;
        for (const auto& path : baseline_paths) baselines.push_back(dcgossip::cli::load_config_file(path));
        return dcgossip::cli::cmd_compare(cfg, baselines, std::cout, std::cerr);
    } catch (const dcgossip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return dcgossip::cli::exit_config_error;
    }
}
