#include "dcgossip/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "dcgossip/errors.hpp"

namespace dcgossip::cli {

namespace {

constexpr std::uint64_t kScheduleStream = 0x9E3779B97F4A7C15ULL;

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const TopologyError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const LivenessError& e) {
        err << "liveness error: " << e.what() << '\n';
        return exit_runtime_error;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return exit_runtime_error;
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::string status_of(const RunOutcome& outcome) { return outcome.convergence ? "converged" : "not_converged"; }

std::string summary_line(const RunSpec& spec, const RunOutcome& o) {
    std::ostringstream line;
    line << "run=" << spec.name << " backend=" << to_string(spec.backend) << " topology=" << spec.topology_label
         << " rule=" << to_string(spec.config.rule.variant) << " converged=" << (o.convergence ? "yes" : "no")
         << " convergence_time=" << (o.convergence ? std::to_string(*o.convergence) : "none")
         << " iterations=" << o.trace.iterations() - 1 << " final_drift=" << format_number(o.final_drift)
         << " max_drift=" << format_number(o.max_drift)
         << " final_disagreement=" << format_number(o.final_disagreement)
         << " messages=" << o.trace.messages_sent();
    return line.str();
}

struct SweepRow {
    std::string status;
    std::string fields;
};

SweepRow sweep_row(const ExperimentRun& run, const std::filesystem::path& dir, bool write_traces) {
    auto failed = [](std::string status) { return SweepRow{std::move(status), ",,,,,"}; };
    try {
        RunSpec spec = build_run_spec(run.settings);
        RunOutcome o = execute(spec);
        if (write_traces) write_run_outputs(dir, run.name, o);
        std::ostringstream fields;
        fields << (o.convergence ? std::to_string(*o.convergence) : "") << ',' << o.trace.iterations() - 1 << ','
               << format_number(o.max_drift) << ',' << format_number(o.final_disagreement) << ','
               << format_number(o.expected_report.second_eigenvalue_modulus) << ',' << o.trace.messages_sent();
        return SweepRow{status_of(o), fields.str()};
    } catch (const ConfigError&) {
        return failed("config_error");
    } catch (const TopologyError&) {
        return failed("topology_error");
    } catch (const LivenessError&) {
        return failed("liveness_error");
    } catch (const std::exception&) {
        return failed("runtime_error");
    }
}

} // namespace

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "iteration,node_id,x,phi\n";
    for (std::size_t k = 0; k < trace.iterations(); ++k)
        for (Eigen::Index i = 0; i < trace.states[k].size(); ++i)
            out << k << ',' << i << ',' << format_number(trace.states[k][i]) << ','
                << int(trace.activations[k][static_cast<std::size_t>(i)]) << '\n';
}

void write_metrics_csv(std::ostream& out, const Trace& trace) {
    out << "iteration,drift,disagreement\n";
    for (std::size_t k = 0; k < trace.iterations(); ++k)
        out << k << ',' << format_number(trace.drift[k]) << ',' << format_number(trace.disagreement[k]) << '\n';
}

void write_messages_csv(std::ostream& out, const Trace& trace) {
    out << "time,kind,src,dst,payload\n";
    for (const auto& m : trace.message_log) {
        out << m.time << ',' << to_string(m.kind) << ',' << m.src << ',';
        if (m.dst) out << *m.dst;
        else out << "broadcast";
        out << ',';
        if (std::holds_alternative<double>(m.payload)) out << format_number(std::get<double>(m.payload));
        else if (std::holds_alternative<bool>(m.payload)) out << (std::get<bool>(m.payload) ? 1 : 0);
        out << '\n';
    }
}

RunOutcome execute(const RunSpec& spec) {
    const RunConfig& cfg = spec.config;
    RunOutcome outcome;
    switch (spec.backend) {
    case Backend::agent: outcome.trace = run_agent_sim(cfg); break;
    case Backend::matrix: {
        Rng rng(cfg.seed ^ kScheduleStream);
        const auto schedule = layered_schedule(assign_layers(cfg.graph), cfg.max_iterations, cfg.duty, rng);
        outcome.trace = run_matrix_sim(cfg, schedule);
        break;
    }
    case Backend::pairwise: outcome.trace = run_pairwise_baseline(cfg); break;
    }
    const Trace& t = outcome.trace;
    outcome.convergence = convergence_time(t, cfg.tolerance);
    outcome.max_drift = *std::max_element(t.drift.begin(), t.drift.end());
    outcome.final_drift = t.drift.back();
    outcome.final_disagreement = t.disagreement.back();
    const Eigen::MatrixXd expected = spec.backend == Backend::pairwise
                                         ? expected_pairwise_matrix(cfg.graph, cfg.rule.alpha)
                                         : expected_weight_matrix(cfg.graph, cfg.rule);
    outcome.expected_report = check_consensus_conditions(expected);
    return outcome;
}

void write_run_outputs(const std::filesystem::path& dir, const std::string& name, const RunOutcome& outcome) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_output(dir / (name + "_trace.csv"));
        write_trace_csv(out, outcome.trace);
    }
    {
        auto out = open_output(dir / (name + "_metrics.csv"));
        write_metrics_csv(out, outcome.trace);
    }
    {
        auto out = open_output(dir / (name + "_spectral.txt"));
        out << to_key_value(outcome.expected_report);
    }
    if (!outcome.trace.message_log.empty()) {
        auto out = open_output(dir / (name + "_messages.csv"));
        write_messages_csv(out, outcome.trace);
    }
}

std::string sweep_csv_header() {
    return "run_id,topology,rule,seed,status,convergence_time,iterations,max_drift,final_disagreement,"
           "lambda2_expected,messages";
}

int cmd_run(const ConfigMap& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunSpec spec = build_run_spec(cfg);
        const RunOutcome outcome = execute(spec);
        write_run_outputs(spec.output_dir, spec.name, outcome);
        out << summary_line(spec, outcome) << '\n';
        return outcome.convergence ? exit_ok : exit_not_converged;
    });
}

int cmd_sweep(const ConfigMap& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentSpec spec = build_experiment(cfg);
        const bool write_traces = [&] {
            auto it = cfg.find("sweep.write_traces");
            return it != cfg.end() && (it->second == "1" || it->second == "true");
        }();
        std::size_t threads = 0;
        if (auto it = cfg.find("sweep.threads"); it != cfg.end()) threads = std::stoul(it->second);
        if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
        threads = std::min(threads, std::max<std::size_t>(1, spec.runs.size()));

        std::vector<SweepRow> rows(spec.runs.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < spec.runs.size(); i = next++)
                rows[i] = sweep_row(spec.runs[i], spec.outputs, write_traces);
        };
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        pool.clear();

        std::filesystem::create_directories(spec.outputs);
        auto csv = open_output(spec.outputs / (spec.name + "_aggregate.csv"));
        csv << sweep_csv_header() << '\n';
        std::size_t ok = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& run = spec.runs[i];
            csv << run.name << ',' << run.topology_label << ',' << run.rule << ',' << run.seed << ','
                << rows[i].status << ',' << rows[i].fields << '\n';
            if (rows[i].status == "converged") ++ok;
        }
        out << "sweep=" << spec.name << " runs=" << rows.size() << " converged=" << ok
            << " aggregate=" << (spec.outputs / (spec.name + "_aggregate.csv")).string() << '\n';
        return exit_ok;
    });
}

int cmd_compare(const ConfigMap& cfg, const std::vector<ConfigMap>& baselines, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&] {
        RunSpec proposed = build_run_spec(cfg);
        if (proposed.backend == Backend::pairwise)
            throw ConfigError("compare expects the proposed protocol as the main config");

        std::vector<std::pair<std::string, RunSpec>> entries;
        entries.emplace_back("proposed", proposed);
        if (baselines.empty()) {
            ConfigMap pairwise = merged(cfg, {{"run.backend", "pairwise"}});
            entries.emplace_back("pairwise", build_run_spec(pairwise));
        } else {
            const Eigen::VectorXd x0 = initial_state_vector(proposed.config);
            for (const auto& baseline_cfg : baselines) {
                RunSpec baseline = build_run_spec(merged(baseline_cfg, {{"run.backend", "pairwise"}}));
                if (!(baseline.config.graph == proposed.config.graph))
                    throw ConfigError("baseline '" + baseline.name + "' uses a different topology");
                if (!initial_state_vector(baseline.config).isApprox(x0, 0.0))
                    throw ConfigError("baseline '" + baseline.name + "' uses a different x(0)");
                entries.emplace_back(baseline.name, std::move(baseline));
            }
        }

        std::ostringstream table;
        table << "method,topology,rule,converged,convergence_time,iterations,messages,final_drift,"
                 "final_disagreement,max_abs_error\n";
        for (const auto& [method, spec] : entries) {
            const RunOutcome o = execute(spec);
            const Eigen::VectorXd& last = o.trace.states.back();
            const double max_err = (last.array() - o.trace.x_avg).abs().maxCoeff();
            table << method << ',' << spec.topology_label << ',' << to_string(spec.config.rule.variant) << ','
                  << (o.convergence ? 1 : 0) << ',' << (o.convergence ? std::to_string(*o.convergence) : "") << ','
                  << o.trace.iterations() - 1 << ',' << o.trace.messages_sent() << ','
                  << format_number(o.final_drift) << ',' << format_number(o.final_disagreement) << ','
                  << format_number(max_err) << '\n';
        }
        std::filesystem::create_directories(proposed.output_dir);
        auto csv = open_output(proposed.output_dir / (proposed.name + "_compare.csv"));
        csv << table.str();
        out << table.str();
        return exit_ok;
    });
}

int cmd_spectra(const ConfigMap& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunSpec spec = build_run_spec(cfg);
        const Graph& g = spec.config.graph;
        std::vector<std::pair<std::string, Eigen::MatrixXd>> matrices;
        matrices.emplace_back("averaging", consensus_weight_matrix(g, spec.config.rule));
        if (spec.config.rule.variant != RuleVariant::pairwise_baseline)
            matrices.emplace_back("expected", expected_weight_matrix(g, spec.config.rule));
        if (!g.directed()) matrices.emplace_back("expected_pairwise", expected_pairwise_matrix(g, spec.config.rule.alpha));

        const auto layers = assign_layers(g);
        std::ostringstream csv;
        csv << "matrix," << spectral_csv_header() << '\n';
        out << "topology=" << spec.topology_label << "\nnodes=" << g.size() << "\nlayers=" << layers.layer_count
            << "\nrule=" << to_string(spec.config.rule.variant) << '\n';
        for (const auto& [label, m] : matrices) {
            const SpectralReport report = check_consensus_conditions(m);
            out << '[' << label << "]\n" << to_key_value(report);
            csv << label << ',' << to_csv_row(report) << '\n';
        }
        std::filesystem::create_directories(spec.output_dir);
        auto file = open_output(spec.output_dir / (spec.name + "_spectra.csv"));
        file << csv.str();
        return exit_ok;
    });
}

} // namespace dcgossip::cli
