#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcgossip/analysis.hpp"
#include "dcgossip/cli/config.hpp"

namespace dcgossip::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,
    exit_runtime_error = 2,
    exit_not_converged = 3,
};

/// Shortest round-trip decimal form; the only float formatting used in outputs.
std::string format_number(double value);

/// iteration,node_id,x,phi
void write_trace_csv(std::ostream& out, const Trace& trace);
/// iteration,drift,disagreement
void write_metrics_csv(std::ostream& out, const Trace& trace);
/// time,kind,src,dst,payload
void write_messages_csv(std::ostream& out, const Trace& trace);

struct RunOutcome {
    Trace trace;
    std::optional<std::size_t> convergence;
    SpectralReport expected_report; ///< report on E[A_Phi] (or E[W] for pairwise)
    double max_drift = 0.0;
    double final_drift = 0.0;
    double final_disagreement = 0.0;
};

/// Runs the simulation selected by `spec.backend` and computes the summary metrics.
RunOutcome execute(const RunSpec& spec);

/// Writes <name>_trace.csv, <name>_metrics.csv, <name>_spectral.txt (and
/// <name>_messages.csv when messages were recorded) under `dir`.
void write_run_outputs(const std::filesystem::path& dir, const std::string& name, const RunOutcome& outcome);

std::string sweep_csv_header();

int cmd_run(const ConfigMap& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const ConfigMap& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const ConfigMap& cfg, const std::vector<ConfigMap>& baselines, std::ostream& out, std::ostream& err);
int cmd_spectra(const ConfigMap& cfg, std::ostream& out, std::ostream& err);

} // namespace dcgossip::cli
