#include "dcgossip/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "dcgossip/errors.hpp"

namespace dcgossip::cli {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "graph.kind",     "graph.n",          "graph.anchor",          "graph.directed",   "graph.side",
        "graph.radius",   "graph.model",      "graph.edge_probability", "graph.max_attempts", "graph.seed",
        "graph.file",     "duty.d_mean",      "duty.d_var",            "duty.t_c",         "duty.p",
        "duty.q",         "duty.activation_mode", "duty.beacon_fallback", "rule.variant",   "rule.alpha",
        "run.seed",       "run.max_iterations", "run.tolerance",       "run.initial_states", "run.backend",
        "run.literal_zeroing", "run.record_messages", "run.repro_target", "run.name",      "output.dir",
        "sweep.name",     "sweep.topologies", "sweep.rules",           "sweep.seeds",      "sweep.threads",
        "sweep.write_traces",
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream in{std::string(text)};
    while (std::getline(in, current, ',')) {
        auto item = trim(current);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

const std::string* find(const ConfigMap& cfg, const std::string& key) {
    auto it = cfg.find(key);
    return it == cfg.end() ? nullptr : &it->second;
}

std::string get_string(const ConfigMap& cfg, const std::string& key, std::string fallback) {
    const auto* v = find(cfg, key);
    return v ? *v : fallback;
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "' expects a number, got '" + text + "'");
    return value;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + text + "'");
    return value;
}

double get_double(const ConfigMap& cfg, const std::string& key, double fallback) {
    const auto* v = find(cfg, key);
    return v ? parse_double(key, *v) : fallback;
}

std::uint64_t get_unsigned(const ConfigMap& cfg, const std::string& key, std::uint64_t fallback) {
    const auto* v = find(cfg, key);
    return v ? parse_unsigned(key, *v) : fallback;
}

bool get_bool(const ConfigMap& cfg, const std::string& key, bool fallback) {
    const auto* v = find(cfg, key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
    if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
    throw ConfigError("key '" + key + "' expects a boolean, got '" + *v + "'");
}

void check_known(const ConfigMap& cfg) {
    for (const auto& [key, value] : cfg)
        if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
}

Graph build_graph(const ConfigMap& cfg, std::string& label) {
    if (const auto* file = find(cfg, "graph.file")) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot open edge list '" + *file + "'");
        label = "file";
        return read_edge_list(in);
    }
    const auto* kind_text = find(cfg, "graph.kind");
    if (!kind_text) throw ConfigError("graph.kind (or graph.file) is required");

    TopologyParams params;
    label = *kind_text;
    TopologyKind kind;
    if (*kind_text == "circular_directed") {
        kind = TopologyKind::circular;
        params.directed = true;
    } else {
        kind = parse_topology_kind(*kind_text);
        params.directed = get_bool(cfg, "graph.directed", false);
        if (kind == TopologyKind::circular && params.directed) label = "circular_directed";
    }
    if (params.directed && kind != TopologyKind::circular)
        throw ConfigError("graph.directed is only supported for circular topologies");

    params.anchor = get_unsigned(cfg, "graph.anchor", 0);
    params.side = get_double(cfg, "graph.side", params.side);
    params.radius = get_double(cfg, "graph.radius", params.radius);
    params.edge_probability = get_double(cfg, "graph.edge_probability", params.edge_probability);
    params.max_attempts = static_cast<int>(get_unsigned(cfg, "graph.max_attempts", 100));
    const auto model = get_string(cfg, "graph.model", "geometric");
    if (model == "geometric") params.model = RandomModel::geometric;
    else if (model == "erdos_renyi") params.model = RandomModel::erdos_renyi;
    else throw ConfigError("graph.model must be geometric or erdos_renyi");

    const auto n = get_unsigned(cfg, "graph.n", 50);
    const auto seed = get_unsigned(cfg, "graph.seed", get_unsigned(cfg, "run.seed", 1));
    return build_topology(kind, n, params, seed);
}

} // namespace

ConfigMap parse_config(std::istream& in) {
    ConfigMap cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        auto key = trim(std::string_view(text).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        cfg[key] = trim(std::string_view(text).substr(eq + 1));
    }
    return cfg;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

ConfigMap parse_flag_overrides(const std::vector<std::string>& args) {
    ConfigMap overrides;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
        const auto body = arg.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            overrides[body.substr(0, eq)] = body.substr(eq + 1);
        } else {
            if (i + 1 >= args.size()) throw ConfigError("flag '" + arg + "' needs a value");
            overrides[body] = args[++i];
        }
    }
    return overrides;
}

ConfigMap merged(ConfigMap base, const ConfigMap& overrides) {
    for (const auto& [key, value] : overrides) base[key] = value;
    return base;
}

ReproTarget parse_repro_target(std::string_view name) {
    if (name == "fig_circular") return ReproTarget::fig_circular;
    if (name == "fig_circular_directed") return ReproTarget::fig_circular_directed;
    if (name == "fig_random") return ReproTarget::fig_random;
    if (name == "fig_star") return ReproTarget::fig_star;
    if (name == "fig_chain") return ReproTarget::fig_chain;
    throw ConfigError("unknown repro target '" + std::string(name) + "'");
}

std::string_view to_string(ReproTarget target) {
    switch (target) {
    case ReproTarget::fig_circular: return "fig_circular";
    case ReproTarget::fig_circular_directed: return "fig_circular_directed";
    case ReproTarget::fig_random: return "fig_random";
    case ReproTarget::fig_star: return "fig_star";
    case ReproTarget::fig_chain: return "fig_chain";
    }
    return "unknown";
}

ConfigMap repro_preset(ReproTarget target) {
    ConfigMap preset{
        {"graph.n", "50"},
        {"rule.variant", "neighborhood_set"},
        {"run.tolerance", "1e-6"},
        {"run.max_iterations", "400"},
        {"run.name", std::string(to_string(target))},
    };
    switch (target) {
    case ReproTarget::fig_circular: preset["graph.kind"] = "circular"; break;
    case ReproTarget::fig_circular_directed: preset["graph.kind"] = "circular_directed"; break;
    case ReproTarget::fig_random:
        preset["graph.kind"] = "random_geometric";
        preset["graph.radius"] = "0.3";
        break;
    case ReproTarget::fig_star: preset["graph.kind"] = "star"; break;
    case ReproTarget::fig_chain: preset["graph.kind"] = "chain"; break;
    }
    return preset;
}

ConfigMap resolve_repro(const ConfigMap& cfg) {
    const auto* target = find(cfg, "run.repro_target");
    if (!target) return cfg;
    return merged(repro_preset(parse_repro_target(*target)), cfg);
}

Backend parse_backend(std::string_view name) {
    if (name == "agent") return Backend::agent;
    if (name == "matrix") return Backend::matrix;
    if (name == "pairwise") return Backend::pairwise;
    throw ConfigError("unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(Backend backend) {
    switch (backend) {
    case Backend::agent: return "agent";
    case Backend::matrix: return "matrix";
    case Backend::pairwise: return "pairwise";
    }
    return "unknown";
}

std::vector<std::string> topology_labels() {
    return {"chain", "star", "circular", "circular_directed", "random_geometric", "complete"};
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(parse_unsigned("sweep.seeds", item));
            continue;
        }
        const auto lo = parse_unsigned("sweep.seeds", trim(item.substr(0, dash)));
        const auto hi = parse_unsigned("sweep.seeds", trim(item.substr(dash + 1)));
        if (hi < lo) throw ConfigError("seed range '" + item + "' is empty");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    return seeds;
}

RunSpec build_run_spec(const ConfigMap& raw) {
    const ConfigMap cfg = resolve_repro(raw);
    check_known(cfg);

    std::string label;
    Graph graph = build_graph(cfg, label);
    RunSpec spec{get_string(cfg, "run.name", "run"), label, parse_backend(get_string(cfg, "run.backend", "agent")),
                 RunConfig{std::move(graph)}, get_string(cfg, "output.dir", "out")};

    RunConfig& rc = spec.config;
    rc.duty.d_mean = get_double(cfg, "duty.d_mean", rc.duty.d_mean);
    rc.duty.d_var = get_double(cfg, "duty.d_var", rc.duty.d_var);
    rc.duty.t_c = get_double(cfg, "duty.t_c", rc.duty.t_c);
    rc.duty.p = get_double(cfg, "duty.p", rc.duty.p);
    rc.duty.q = get_double(cfg, "duty.q", rc.duty.q);
    rc.duty.mode = parse_activation_mode(get_string(cfg, "duty.activation_mode", "alternating"));
    rc.duty.beacon_fallback = get_bool(cfg, "duty.beacon_fallback", true);

    rc.rule.variant = parse_rule_variant(get_string(cfg, "rule.variant", "neighborhood_set"));
    rc.rule.alpha = get_double(cfg, "rule.alpha", rc.rule.alpha);
    if (spec.backend == Backend::pairwise) rc.rule.variant = RuleVariant::pairwise_baseline;
    if (rc.rule.variant == RuleVariant::pairwise_baseline) spec.backend = Backend::pairwise;

    rc.seed = get_unsigned(cfg, "run.seed", 1);
    rc.max_iterations = get_unsigned(cfg, "run.max_iterations", 400);
    rc.tolerance = get_double(cfg, "run.tolerance", rc.tolerance);
    rc.literal_zeroing = get_bool(cfg, "run.literal_zeroing", false);
    rc.record_messages = get_bool(cfg, "run.record_messages", false);
    if (const auto* x0 = find(cfg, "run.initial_states"))
        for (const auto& item : split_list(*x0)) rc.initial_states.push_back(parse_double("run.initial_states", item));

    rc.validate();
    return spec;
}

void ExperimentSpec::validate() const {
    std::set<std::string> names;
    for (const auto& run : runs)
        if (!names.insert(run.name).second) throw ConfigError("duplicate run name '" + run.name + "'");
}

ExperimentSpec build_experiment(const ConfigMap& raw) {
    check_known(raw);
    ExperimentSpec spec;
    spec.name = get_string(raw, "sweep.name", "sweep");
    spec.outputs = get_string(raw, "output.dir", "out");
    if (const auto* target = find(raw, "run.repro_target")) spec.repro_target = parse_repro_target(*target);

    const ConfigMap base = resolve_repro(raw);
    auto topologies = split_list(get_string(base, "sweep.topologies", get_string(base, "graph.kind", "")));
    auto rules = split_list(get_string(base, "sweep.rules", get_string(base, "rule.variant", "neighborhood_set")));
    const auto seeds = parse_seed_list(get_string(base, "sweep.seeds", get_string(base, "run.seed", "1")));
    if (topologies.empty()) throw ConfigError("sweep needs sweep.topologies or graph.kind");
    for (auto& rule : rules) rule = std::string(to_string(parse_rule_variant(rule)));

    for (const auto& topology : topologies)
        for (const auto& rule : rules)
            for (auto seed : seeds) {
                ExperimentRun run;
                run.name = topology + "_" + rule + "_s" + std::to_string(seed);
                run.topology_label = topology;
                run.rule = rule;
                run.seed = seed;
                run.settings = base;
                for (auto it = run.settings.begin(); it != run.settings.end();)
                    it = it->first.rfind("sweep.", 0) == 0 || it->first == "run.repro_target" ? run.settings.erase(it)
                                                                                              : std::next(it);
                run.settings["graph.kind"] = topology;
                run.settings["rule.variant"] = rule;
                run.settings["run.seed"] = std::to_string(seed);
                run.settings["run.name"] = run.name;
                run.settings.erase("graph.seed");
                spec.runs.push_back(std::move(run));
            }
    spec.validate();
    return spec;
}

} // namespace dcgossip::cli
