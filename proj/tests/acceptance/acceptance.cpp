// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dcgossip/analysis.hpp"
#include "dcgossip/cli/commands.hpp"
#include "dcgossip/engine.hpp"
#include "dcgossip/weights.hpp"
#include "oracles.hpp"

using namespace dcgossip;

namespace {

constexpr double kDriftTol = 1e-12;
constexpr double kConvergenceTol = 1e-6;
constexpr std::size_t kIterationBudget = 400;
constexpr std::size_t kRandomFastBound = 100;
constexpr double kBackendTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;
constexpr double kStationaryTol = 0.02;
constexpr double kSpectralMargin = 1e-9;
constexpr double kConservationTol = 1e-12;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Topology {
    std::string label;
    Graph graph;
};

std::vector<Topology> five_topologies(std::size_t n, std::uint64_t seed) {
    TopologyParams directed;
    directed.directed = true;
    return {{"chain", build_topology(TopologyKind::chain, n, {}, seed)},
            {"star", build_topology(TopologyKind::star, n, {}, seed)},
            {"circular_directed", build_topology(TopologyKind::circular, n, directed, seed)},
            {"circular", build_topology(TopologyKind::circular, n, {}, seed)},
            {"random_geometric", build_topology(TopologyKind::random_geometric, n, {}, seed)}};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ActivationSequence random_script(std::size_t n, std::size_t len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ActivationSequence seq;
    for (std::size_t k = 0; k < len; ++k) {
        std::vector<std::uint8_t> phi(n);
        for (auto& b : phi) b = static_cast<std::uint8_t>(rng() & 1U);
        seq.push_back(phi);
    }
    return seq;
}

Outcome drift_reproduction() {
    std::ostringstream detail;
    bool pass = true;
    for (const auto& [label, g] : five_topologies(50, 1)) {
        RunConfig cfg{g};
        cfg.max_iterations = kIterationBudget;
        cfg.stop_on_convergence = false;
        const Trace t = run_agent_sim(cfg);
        const double worst = *std::max_element(t.drift.begin(), t.drift.end());
        pass = pass && worst < kDriftTol;
        detail << label << "=" << fmt(worst) << " ";
    }
    return {pass, "max drift " + detail.str() + "(bound " + fmt(kDriftTol) + ")"};
}

Outcome convergence_reproduction() {
    std::ostringstream detail;
    bool pass = true;
    for (const auto& [label, g] : five_topologies(50, 1)) {
        RunConfig cfg{g};
        cfg.max_iterations = kIterationBudget;
        cfg.tolerance = kConvergenceTol;
        const Trace t = run_agent_sim(cfg);
        const auto k = convergence_time(t, kConvergenceTol);
        const bool ok = k && *k <= kIterationBudget;
        pass = pass && ok;
        detail << label << "=" << (k ? std::to_string(*k) : "none(eps=" + fmt(t.disagreement.back()) + ")") << " ";
    }
    std::size_t fast = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RunConfig cfg{build_topology(TopologyKind::random_geometric, 50, {}, seed)};
        cfg.seed = seed;
        cfg.max_iterations = kIterationBudget;
        const auto k = convergence_time(run_agent_sim(cfg), kConvergenceTol);
        if (k && *k < kRandomFastBound) ++fast;
    }
    pass = pass && fast > 10;
    detail << "random_geometric_seeds_under_" << kRandomFastBound << "=" << fast << "/20";
    return {pass, detail.str()};
}

Outcome backend_equivalence() {
    double worst = 0.0;
    const std::vector<Topology> graphs{{"chain", build_topology(TopologyKind::chain, 5, {}, 1)},
                                       {"star", build_topology(TopologyKind::star, 5, {}, 1)},
                                       {"ring", build_topology(TopologyKind::circular, 5, {}, 1)}};
    for (const auto& [label, g] : graphs) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            RunConfig cfg{g};
            cfg.seed = seed;
            cfg.max_iterations = 20;
            const auto script = random_script(5, 20, seed * 31);
            const Trace a = run_agent_sim(cfg, script);
            const Trace m = run_matrix_sim(cfg, script);
            if (a.iterations() != m.iterations()) return {false, label + ": trajectory lengths differ"};
            for (std::size_t k = 0; k < a.iterations(); ++k)
                worst = std::max(worst, (a.states[k] - m.states[k]).cwiseAbs().maxCoeff());
        }
    }
    return {worst <= kBackendTol, "max entrywise gap " + fmt(worst) + " (bound " + fmt(kBackendTol) + ")"};
}

Outcome closed_form_oracle() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TopologyParams dense;
        dense.radius = 0.7;
        RunConfig cfg{build_topology(TopologyKind::random_geometric, 5, dense, seed)};
        cfg.seed = seed;
        cfg.max_iterations = 20;
        const auto script = random_script(5, 20, seed);
        const auto closed = closed_form_state(cfg, script, 20);
        const Trace t = run_matrix_sim(cfg, script);
        worst = std::max(worst, (closed.head(5) - t.states[20]).cwiseAbs().maxCoeff());
    }
    return {worst <= kClosedFormTol, "max gap at k=20 " + fmt(worst) + " (bound " + fmt(kClosedFormTol) + ")"};
}

Outcome duty_cycle_stationarity() {
    DutyCycleParams p;
    p.mode = ActivationMode::stochastic;
    p.p = 0.2;
    p.q = 0.1;
    Rng rng(2024);
    ActivationState s(1);
    std::size_t awake = 0;
    const std::size_t steps = 100000;
    for (std::size_t k = 0; k < steps; ++k) {
        s = step_activation(s, p, rng);
        awake += s.phi[0];
    }
    const double fraction = static_cast<double>(awake) / steps;
    const double target = 2.0 / 3.0;
    const bool stationary = std::abs(fraction - target) <= kStationaryTol;

    DutyCycleParams alt;
    ActivationState a(50);
    std::vector<std::vector<std::uint8_t>> history{a.phi};
    for (int k = 0; k < 1000; ++k) {
        a = step_activation(a, alt, rng);
        history.push_back(a.phi);
    }
    bool period_two = true;
    for (std::size_t k = 0; k + 2 < history.size(); ++k)
        for (std::size_t i = 0; i < 50; ++i)
            period_two = period_two && history[k + 2][i] == history[k][i] && history[k + 1][i] != history[k][i];
    return {stationary && period_two, "active fraction " + fmt(fraction) + " vs " + fmt(target) +
                                          ", alternating period two: " + (period_two ? "yes" : "no")};
}

Outcome spectral_certification() {
    std::size_t graphs = 0;
    bool pairwise_ok = true;
    double worst_rho = 0.0;
    auto check_pairwise = [&](const Graph& g) {
        const auto w = expected_pairwise_matrix(g);
        const auto r = check_consensus_conditions(w);
        const auto n = static_cast<Eigen::Index>(g.size());
        const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
        const double rho = oracle::gelfand_radius(w - j);
        worst_rho = std::max(worst_rho, rho);
        pairwise_ok = pairwise_ok && r.row_stochastic && r.column_stochastic && r.certified_consensus &&
                      r.certified_average && rho < 1.0 - kSpectralMargin;
        ++graphs;
    };
    for (std::size_t n = 2; n <= 10; ++n) {
        for (auto kind : {TopologyKind::chain, TopologyKind::star, TopologyKind::complete})
            check_pairwise(build_topology(kind, n, {}, 1));
        if (n >= 3) check_pairwise(build_topology(TopologyKind::circular, n, {}, 1));
        TopologyParams p;
        p.radius = 0.6;
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            check_pairwise(build_topology(TopologyKind::random_geometric, n, p, seed));
    }

    bool protocol_ok = true;
    std::ostringstream detail;
    for (const auto& [label, g] : five_topologies(50, 1)) {
        const double l2 = second_eigenvalue_modulus(expected_weight_matrix(g));
        protocol_ok = protocol_ok && l2 < 1.0 - kSpectralMargin;
        detail << label << "=" << std::to_string(l2) << " ";
    }
    return {pairwise_ok && protocol_ok, "pairwise certified on " + std::to_string(graphs) +
                                            " graphs (max rho(W-J) " + fmt(worst_rho) + "); lambda2(E[A]) " +
                                            detail.str()};
}

// Neumaier-compensated sum in extended precision.
double accurate_sum(const Eigen::VectorXd& x) {
    long double sum = 0.0L, carry = 0.0L;
    for (double v : x) {
        const long double t = sum + v;
        carry += std::abs(sum) >= std::abs(static_cast<long double>(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return static_cast<double>(sum + carry);
}

Outcome conservation_properties() {
    std::mt19937_64 rng(77);
    double worst_sum_step = 0.0;
    std::size_t hull_violations = 0;
    const std::vector<RuleVariant> convex{RuleVariant::neighborhood_set, RuleVariant::pure_neighbor,
                                          RuleVariant::pairwise_baseline};
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng() % 28;
        const auto kind = std::array{TopologyKind::chain, TopologyKind::star, TopologyKind::circular,
                                     TopologyKind::random_geometric, TopologyKind::complete}[rng() % 5];
        TopologyParams tp;
        tp.radius = 0.5;
        tp.anchor = rng() % n;
        const Graph g = build_topology(kind, n, tp, rng());
        RunConfig cfg{g};
        cfg.seed = rng();
        cfg.rule.variant = convex[static_cast<std::size_t>(trial) % convex.size()];
        cfg.max_iterations = 300;
        cfg.stop_on_convergence = false;
        const Trace t = cfg.rule.variant == RuleVariant::pairwise_baseline ? run_pairwise_baseline(cfg)
                                                                          : run_agent_sim(cfg);
        const double lo = t.states.front().minCoeff(), hi = t.states.front().maxCoeff();
        for (std::size_t k = 0; k < t.iterations(); ++k) {
            if (t.states[k].minCoeff() < lo - 1e-12 || t.states[k].maxCoeff() > hi + 1e-12) ++hull_violations;
            if (k > 0 && cfg.rule.variant != RuleVariant::pure_neighbor)
                worst_sum_step =
                    std::max(worst_sum_step, std::abs(accurate_sum(t.states[k]) - accurate_sum(t.states[k - 1])));
        }
    }
    return {worst_sum_step < kConservationTol && hull_violations == 0,
            "max per-iteration sum change " + fmt(worst_sum_step) + " (bound " + fmt(kConservationTol) +
                "), hull violations " + std::to_string(hull_violations) + " over 100 configs"};
}

std::vector<std::pair<std::string, std::string>> csv_files(const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".csv") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        out.emplace_back(entry.path().filename().string(), s.str());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Outcome determinism() {
    using namespace dcgossip::cli;
    const auto root = std::filesystem::temp_directory_path() / "dcgossip_acceptance";
    std::filesystem::remove_all(root);
    auto run_all = [&](const std::string& tag) {
        const std::string dir = (root / tag).string();
        std::ostringstream out, err;
        const ConfigMap base{{"output.dir", dir}, {"run.record_messages", "true"}, {"duty.d_mean", "0.5"},
                             {"duty.d_var", "1"}, {"duty.activation_mode", "stochastic"}, {"duty.p", "0.7"},
                             {"duty.q", "0.2"}};
        cmd_run(merged(base, {{"run.repro_target", "fig_random"}, {"run.name", "rg"}}), out, err);
        cmd_run(merged(base, {{"graph.kind", "chain"}, {"graph.n", "12"}, {"run.backend", "matrix"}, {"run.name", "mx"}}),
                out, err);
        cmd_sweep(merged(base, {{"graph.n", "15"}, {"sweep.name", "sw"}, {"sweep.topologies", "star,random_geometric,circular"},
                                {"sweep.rules", "neighborhood_set,pairwise"}, {"sweep.seeds", "1-4"},
                                {"sweep.write_traces", "true"}}),
                  out, err);
        cmd_compare(merged(base, {{"graph.kind", "random_geometric"}, {"graph.n", "20"}, {"run.name", "cmp"},
                                  {"run.max_iterations", "20000"}}),
                    {}, out, err);
        cmd_spectra(merged(base, {{"graph.kind", "random_geometric"}, {"graph.n", "20"}, {"run.name", "sp"}}), out, err);
        return csv_files(dir);
    };
    const auto first = run_all("a");
    const auto second = run_all("b");
    std::filesystem::remove_all(root);
    const bool same = !first.empty() && first == second;
    return {same, std::to_string(first.size()) + " CSV files compared byte for byte"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"drift reproduction on five 50-node topologies", drift_reproduction},
        {"convergence within 400 iterations; random geometric under 100 on most seeds", convergence_reproduction},
        {"agent and matrix backends agree on scripted activations", backend_equivalence},
        {"closed-form state matches the recursion at k=20", closed_form_oracle},
        {"duty-cycle stationarity and alternating period", duty_cycle_stationarity},
        {"spectral certification of pairwise and expected protocol matrices", spectral_certification},
        {"sum conservation and convex-hull invariance", conservation_properties},
        {"byte-identical outputs on re-run", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %zu: %s | %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
