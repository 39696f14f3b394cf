#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcgossip/cli/commands.hpp"
#include "dcgossip/errors.hpp"

using namespace dcgossip;
using namespace dcgossip::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dcgossip_unit_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("config parsing") {
    std::istringstream in("# comment\n\ngraph.kind = chain\n graph.n=5\nrun.name=a=b\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.at("graph.kind") == "chain");
    CHECK(cfg.at("graph.n") == "5");
    CHECK(cfg.at("run.name") == "a=b");
    std::istringstream bad("no equals sign\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("flag overrides") {
    const auto o = parse_flag_overrides({"--graph.n=7", "--rule.variant", "pure_neighbor"});
    CHECK(o.at("graph.n") == "7");
    CHECK(o.at("rule.variant") == "pure_neighbor");
    CHECK(merged({{"graph.n", "3"}}, o).at("graph.n") == "7");
    CHECK_THROWS_AS(parse_flag_overrides({"stray"}), ConfigError);
}

TEST_CASE("seed lists") {
    CHECK(parse_seed_list("1-3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(parse_seed_list("").empty());
    CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
}

TEST_CASE("run spec construction") {
    SUBCASE("defaults") {
        const auto spec = build_run_spec({{"graph.kind", "star"}});
        CHECK(spec.config.graph.size() == 50);
        CHECK(spec.backend == Backend::agent);
        CHECK(spec.config.rule.variant == RuleVariant::neighborhood_set);
    }
    SUBCASE("directed ring label") {
        const auto spec = build_run_spec({{"graph.kind", "circular_directed"}, {"graph.n", "6"}});
        CHECK(spec.config.graph.directed());
        CHECK(spec.topology_label == "circular_directed");
    }
    SUBCASE("pairwise backend implies the pairwise rule") {
        const auto spec = build_run_spec({{"graph.kind", "chain"}, {"run.backend", "pairwise"}});
        CHECK(spec.config.rule.variant == RuleVariant::pairwise_baseline);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(build_run_spec({{"graph.kind", "chain"}, {"graph.colour", "red"}}), ConfigError);
        CHECK_THROWS_AS(build_run_spec({{"graph.kind", "chain"}, {"run.max_iterations", "0"}}), ConfigError);
        CHECK_THROWS_AS(build_run_spec({{"graph.kind", "chain"}, {"graph.n", "x"}}), ConfigError);
        CHECK_THROWS_AS(build_run_spec({{"graph.kind", "chain"}, {"rule.variant", "median"}}), ConfigError);
    }
    SUBCASE("edge list file") {
        const auto dir = scratch("edges");
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "g.txt") << "3 1 0\n0 1\n1 2\n";
        const auto spec = build_run_spec({{"graph.file", (dir / "g.txt").string()}});
        CHECK(spec.config.graph.size() == 3);
        CHECK(spec.config.graph.anchor() == 1);
    }
}

TEST_CASE("reproduction presets") {
    for (auto t : {ReproTarget::fig_circular, ReproTarget::fig_circular_directed, ReproTarget::fig_random,
                   ReproTarget::fig_star, ReproTarget::fig_chain}) {
        const auto spec = build_run_spec(resolve_repro({{"run.repro_target", std::string(to_string(t))}}));
        CHECK(spec.config.graph.size() == 50);
        CHECK(spec.config.max_iterations == 400);
        CHECK(spec.config.tolerance == 1e-6);
        CHECK(spec.config.rule.variant == RuleVariant::neighborhood_set);
    }
    const auto over = resolve_repro({{"run.repro_target", "fig_chain"}, {"graph.n", "10"}});
    CHECK(over.at("graph.n") == "10");
    CHECK_THROWS_AS(parse_repro_target("fig_9"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("cmd_run writes outputs and reports") {
    const auto dir = scratch("run");
    std::ostringstream out, err;
    const ConfigMap cfg{{"graph.kind", "chain"}, {"graph.n", "3"}, {"run.initial_states", "0,6,0"},
                        {"run.max_iterations", "2000"}, {"run.record_messages", "true"}, {"output.dir", dir.string()},
                        {"run.name", "c3"}};
    CHECK(cmd_run(cfg, out, err) == exit_ok);
    CHECK(out.str().find("converged=yes") != std::string::npos);
    const auto metrics = lines_of(slurp(dir / "c3_metrics.csv"));
    CHECK(metrics.front() == "iteration,drift,disagreement");
    for (std::size_t i = 1; i < metrics.size(); ++i) {
        const auto first = metrics[i].find(',');
        const auto second = metrics[i].find(',', first + 1);
        CHECK(std::stod(metrics[i].substr(first + 1, second - first - 1)) < 1e-12);
    }
    CHECK(slurp(dir / "c3_trace.csv").rfind("iteration,node_id,x,phi\n", 0) == 0);
    CHECK(slurp(dir / "c3_messages.csv").rfind("time,kind,src,dst,payload\n", 0) == 0);
    CHECK(slurp(dir / "c3_spectral.txt").find("certified_average=") != std::string::npos);
}

TEST_CASE("cmd_run exit codes") {
    const auto dir = scratch("codes");
    std::ostringstream out, err;
    CHECK(cmd_run({{"graph.kind", "chain"}, {"run.max_iterations", "0"}, {"output.dir", dir.string()}}, out, err) ==
          exit_config_error);
    CHECK(cmd_run({{"graph.kind", "chain"}, {"graph.n", "20"}, {"run.max_iterations", "5"},
                   {"output.dir", dir.string()}},
                  out, err) == exit_not_converged);
    CHECK(cmd_run({{"graph.kind", "chain"}, {"graph.n", "5"}, {"duty.beacon_fallback", "false"},
                   {"output.dir", dir.string()}},
                  out, err) == exit_runtime_error);
    CHECK(cmd_run({{"graph.kind", "random_geometric"}, {"graph.radius", "0.001"}, {"graph.max_attempts", "2"},
                   {"output.dir", dir.string()}},
                  out, err) == exit_config_error);
}

TEST_CASE("cmd_run on the random preset converges within the iteration budget") {
    const auto dir = scratch("fig_random");
    std::ostringstream out, err;
    CHECK(cmd_run({{"run.repro_target", "fig_random"}, {"output.dir", dir.string()}}, out, err) == exit_ok);
}

TEST_CASE("cmd_sweep") {
    const auto dir = scratch("sweep");
    const ConfigMap base{{"graph.n", "8"},
                         {"sweep.topologies", "chain,star,circular,circular_directed,random_geometric"},
                         {"sweep.rules", "neighborhood_set,pure_neighbor,pairwise"},
                         {"sweep.seeds", "1-10"},
                         {"run.max_iterations", "300"},
                         {"output.dir", dir.string()},
                         {"sweep.threads", "4"}};
    std::ostringstream out, err;
    SUBCASE("cardinality and determinism") {
        CHECK(cmd_sweep(merged(base, {{"sweep.name", "a"}}), out, err) == exit_ok);
        CHECK(cmd_sweep(merged(base, {{"sweep.name", "b"}, {"sweep.threads", "1"}}), out, err) == exit_ok);
        const auto a = slurp(dir / "a_aggregate.csv");
        CHECK(line_count(a) == 151);
        CHECK(lines_of(a).front() == sweep_csv_header());
        CHECK(a == slurp(dir / "b_aggregate.csv"));
        CHECK(a.find("circular_directed,pairwise_baseline,1,config_error") != std::string::npos);
    }
    SUBCASE("empty seed list gives a header-only file") {
        CHECK(cmd_sweep(merged(base, {{"sweep.name", "e"}, {"sweep.seeds", ""}}), out, err) == exit_ok);
        CHECK(slurp(dir / "e_aggregate.csv") == sweep_csv_header() + "\n");
    }
    SUBCASE("per-run traces on request") {
        CHECK(cmd_sweep(merged(base, {{"sweep.name", "t"}, {"sweep.topologies", "star"}, {"sweep.rules", "neighborhood_set"},
                                      {"sweep.seeds", "3"}, {"sweep.write_traces", "true"}}),
                        out, err) == exit_ok);
        CHECK(std::filesystem::exists(dir / "star_neighborhood_set_s3_trace.csv"));
    }
}

TEST_CASE("cmd_compare") {
    const auto dir = scratch("compare");
    std::ostringstream out, err;
    SUBCASE("two nodes settle after one exchange") {
        CHECK(cmd_compare({{"graph.kind", "chain"}, {"graph.n", "2"}, {"output.dir", dir.string()}}, {}, out, err) ==
              exit_ok);
        const auto rows = lines_of(out.str());
        REQUIRE(rows.size() == 3);
        CHECK(rows[1].find("proposed,chain,neighborhood_set,1,1,") == 0);
        CHECK(rows[2].find("pairwise,chain,pairwise_baseline,1,1,") == 0);
    }
    SUBCASE("chain of ten has two rows with traffic") {
        CHECK(cmd_compare({{"graph.kind", "chain"}, {"graph.n", "10"}, {"run.max_iterations", "100000"},
                           {"output.dir", dir.string()}, {"run.name", "c10"}},
                          {}, out, err) == exit_ok);
        const auto rows = lines_of(slurp(dir / "c10_compare.csv"));
        REQUIRE(rows.size() == 3);
        for (std::size_t i = 1; i < 3; ++i) {
            std::vector<std::string> cells;
            std::istringstream row(rows[i]);
            for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
            CHECK(std::stoull(cells[6]) > 0);
        }
    }
    SUBCASE("star of fifty reaches the average with both methods") {
        CHECK(cmd_compare({{"graph.kind", "star"}, {"run.max_iterations", "200000"}, {"run.tolerance", "1e-7"}, {"output.dir", dir.string()},
                           {"run.name", "s50"}},
                          {}, out, err) == exit_ok);
        for (const auto& row : lines_of(out.str()))
            if (row.rfind("method", 0) != 0) {
                CHECK(row.find(",1,") != std::string::npos);
                CHECK(std::stod(row.substr(row.rfind(',') + 1)) < 1e-6);
            }
    }
    SUBCASE("baselines must share the graph and initial states") {
        const ConfigMap main{{"graph.kind", "chain"}, {"graph.n", "6"}, {"output.dir", dir.string()}};
        CHECK(cmd_compare(main, {{{"graph.kind", "star"}, {"graph.n", "6"}}}, out, err) == exit_config_error);
        CHECK(cmd_compare(main, {{{"graph.kind", "chain"}, {"graph.n", "6"}, {"run.seed", "9"}}}, out, err) ==
              exit_config_error);
        CHECK(cmd_compare(main, {{{"graph.kind", "chain"}, {"graph.n", "6"}, {"run.max_iterations", "50000"}}}, out,
                          err) == exit_ok);
    }
}

TEST_CASE("cmd_spectra") {
    const auto dir = scratch("spectra");
    std::ostringstream out, err;
    CHECK(cmd_spectra({{"graph.kind", "circular"}, {"graph.n", "10"}, {"output.dir", dir.string()}, {"run.name", "r"}},
                      out, err) == exit_ok);
    CHECK(out.str().find("[expected_pairwise]") != std::string::npos);
    CHECK(line_count(slurp(dir / "r_spectra.csv")) == 4);
    std::ostringstream out2;
    CHECK(cmd_spectra({{"graph.kind", "circular_directed"}, {"graph.n", "10"}, {"output.dir", dir.string()}}, out2,
                      err) == exit_ok);
    CHECK(out2.str().find("[expected_pairwise]") == std::string::npos);
}
