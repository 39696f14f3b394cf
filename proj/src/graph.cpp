#include "dcgossip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "dcgossip/errors.hpp"

namespace dcgossip {

namespace {

// Nodes reachable from `root` following out-edges.
std::vector<bool> reachable_from(std::size_t n, NodeId root, const std::vector<std::vector<NodeId>>& out) {
    std::vector<bool> seen(n, false);
    std::deque<NodeId> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : out[u]) {
            if (!seen[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

bool adjacency_connected(std::size_t n, NodeId root, const std::vector<std::uint8_t>& adj) {
    std::vector<std::vector<NodeId>> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i * n + j]) out[i].push_back(j);
    auto seen = reachable_from(n, root, out);
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace

Graph Graph::from_adjacency(std::size_t node_count, NodeId anchor, std::vector<std::uint8_t> adjacency,
                            bool directed) {
    if (node_count < 1) throw TopologyError("graph needs at least one node");
    if (adjacency.size() != node_count * node_count)
        throw TopologyError("adjacency size does not match node count");
    if (anchor >= node_count) throw TopologyError("anchor index out of range");

    Graph g;
    g.node_count_ = node_count;
    g.anchor_ = anchor;
    g.directed_ = directed;
    g.adjacency_ = std::move(adjacency);
    for (auto& a : g.adjacency_) a = a ? 1 : 0;

    const std::size_t n = node_count;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.adjacency_[i * n + i]) throw TopologyError("self-loop at node " + std::to_string(i));
        if (!directed)
            for (std::size_t j = i + 1; j < n; ++j)
                if (g.adjacency_[i * n + j] != g.adjacency_[j * n + i])
                    throw TopologyError("undirected adjacency is not symmetric");
    }

    g.out_.assign(n, {});
    g.in_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.adjacency_[i * n + j]) {
                g.out_[i].push_back(j);
                g.in_[j].push_back(i);
            }

    auto seen = reachable_from(n, anchor, g.out_);
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw TopologyError("graph is not connected from the anchor");
    return g;
}

Graph Graph::from_edges(std::size_t node_count, NodeId anchor, std::span<const std::pair<NodeId, NodeId>> edges,
                        bool directed) {
    std::vector<std::uint8_t> adj(node_count * node_count, 0);
    for (auto [i, j] : edges) {
        if (i >= node_count || j >= node_count) throw TopologyError("edge endpoint out of range");
        adj[i * node_count + j] = 1;
        if (!directed) adj[j * node_count + i] = 1;
    }
    return from_adjacency(node_count, anchor, std::move(adj), directed);
}

void Graph::check_node(NodeId i) const {
    if (i >= node_count_) throw std::out_of_range("node index " + std::to_string(i) + " out of range");
}

bool Graph::has_edge(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    return adjacency_[from * node_count_ + to] != 0;
}

const std::vector<NodeId>& Graph::out_neighbors(NodeId i) const {
    check_node(i);
    return out_[i];
}

const std::vector<NodeId>& Graph::in_neighbors(NodeId i) const {
    check_node(i);
    return in_[i];
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> result;
    for (NodeId i = 0; i < node_count_; ++i)
        for (NodeId j : out_[i])
            if (directed_ || i < j) result.emplace_back(i, j);
    return result;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
    const auto n = static_cast<Eigen::Index>(node_count_);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = adjacency_[static_cast<std::size_t>(i * n + j)];
    return a;
}

TopologyKind parse_topology_kind(std::string_view name) {
    if (name == "chain") return TopologyKind::chain;
    if (name == "star") return TopologyKind::star;
    if (name == "circular") return TopologyKind::circular;
    if (name == "random_geometric" || name == "random") return TopologyKind::random_geometric;
    if (name == "complete") return TopologyKind::complete;
    throw ConfigError("unknown topology kind '" + std::string(name) + "'");
}

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
    case TopologyKind::chain: return "chain";
    case TopologyKind::star: return "star";
    case TopologyKind::circular: return "circular";
    case TopologyKind::random_geometric: return "random_geometric";
    case TopologyKind::complete: return "complete";
    }
    return "unknown";
}

Graph build_topology(TopologyKind kind, std::size_t n, const TopologyParams& params, std::uint64_t seed) {
    if (n < 2) throw ConfigError("topology needs n >= 2");
    if (params.anchor >= n) throw ConfigError("anchor index out of range");

    std::vector<std::uint8_t> adj(n * n, 0);
    auto link = [&](std::size_t i, std::size_t j, bool both) {
        adj[i * n + j] = 1;
        if (both) adj[j * n + i] = 1;
    };

    switch (kind) {
    case TopologyKind::chain:
        for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1, true);
        return Graph::from_adjacency(n, params.anchor, std::move(adj), false);

    case TopologyKind::star:
        for (std::size_t i = 1; i < n; ++i) link(0, i, true);
        return Graph::from_adjacency(n, params.anchor, std::move(adj), false);

    case TopologyKind::circular:
        for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n, !params.directed);
        return Graph::from_adjacency(n, params.anchor, std::move(adj), params.directed);

    case TopologyKind::complete:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) link(i, j, true);
        return Graph::from_adjacency(n, params.anchor, std::move(adj), false);

    case TopologyKind::random_geometric: {
        if (params.max_attempts < 1) throw ConfigError("max_attempts must be positive");
        std::mt19937_64 rng(seed);
        if (params.model == RandomModel::geometric) {
            if (!(params.side > 0) || !(params.radius > 0))
                throw ConfigError("random_geometric needs positive side and radius");
            std::uniform_real_distribution<double> coord(0.0, params.side);
            std::vector<double> xs(n), ys(n);
            for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
                for (std::size_t i = 0; i < n; ++i) {
                    xs[i] = coord(rng);
                    ys[i] = coord(rng);
                }
                std::fill(adj.begin(), adj.end(), 0);
                const double r2 = params.radius * params.radius;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j) {
                        double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
                        if (dx * dx + dy * dy <= r2) link(i, j, true);
                    }
                if (adjacency_connected(n, params.anchor, adj))
                    return Graph::from_adjacency(n, params.anchor, std::move(adj), false);
            }
        } else {
            if (!(params.edge_probability > 0) || params.edge_probability > 1)
                throw ConfigError("erdos_renyi needs edge_probability in (0, 1]");
            std::bernoulli_distribution coin(params.edge_probability);
            for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
                std::fill(adj.begin(), adj.end(), 0);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        if (coin(rng)) link(i, j, true);
                if (adjacency_connected(n, params.anchor, adj))
                    return Graph::from_adjacency(n, params.anchor, std::move(adj), false);
            }
        }
        throw UnconnectableTopology("no connected random topology after " + std::to_string(params.max_attempts) +
                                    " attempts");
    }
    }
    throw ConfigError("unhandled topology kind");
}

std::vector<NodeId> neighborhood(const Graph& g, NodeId i) { return g.out_neighbors(i); }

std::vector<NodeId> LayerAssignment::nodes_in(int layer) const {
    std::vector<NodeId> nodes;
    for (NodeId i = 0; i < layer_of.size(); ++i)
        if (layer_of[i] == layer) nodes.push_back(i);
    return nodes;
}

LayerAssignment assign_layers(const Graph& g) {
    const std::size_t n = g.size();
    std::vector<int> hops(n, -1);
    std::deque<NodeId> queue{g.anchor()};
    hops[g.anchor()] = 0;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.out_neighbors(u)) {
            if (hops[v] < 0) {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }

    LayerAssignment result;
    result.layer_of.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        if (hops[i] < 0) throw TopologyError("node " + std::to_string(i) + " unreachable from anchor");
        result.layer_of[i] = std::max(hops[i], 1);
    }
    result.layer_count = *std::max_element(result.layer_of.begin(), result.layer_of.end());
    result.layer_sizes.assign(static_cast<std::size_t>(result.layer_count), 0);
    for (int m : result.layer_of) ++result.layer_sizes[static_cast<std::size_t>(m - 1)];
    return result;
}

Eigen::MatrixXd consensus_weight_matrix(const Graph& g, const UpdateRule& rule) {
    rule.validate();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& from = g.in_neighbors(static_cast<NodeId>(i));
        const double deg = static_cast<double>(from.size());
        switch (rule.variant) {
        case RuleVariant::neighborhood_set: {
            const double w = 1.0 / (deg + 1.0);
            a(i, i) = w;
            for (NodeId j : from) a(i, static_cast<Eigen::Index>(j)) = w;
            break;
        }
        case RuleVariant::pure_neighbor:
        case RuleVariant::paper_literal:
            // A node nobody transmits to (directed source) can only hold its value.
            if (from.empty()) a(i, i) = 1.0;
            for (NodeId j : from) a(i, static_cast<Eigen::Index>(j)) = 1.0 / deg;
            break;
        case RuleVariant::pairwise_baseline:
            a(i, i) = from.empty() ? 1.0 : 1.0 - rule.alpha;
            for (NodeId j : from) a(i, static_cast<Eigen::Index>(j)) = rule.alpha / deg;
            break;
        }
    }
    return a;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.size() << ' ' << g.anchor() << ' ' << (g.directed() ? 1 : 0) << '\n';
    for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    NodeId anchor = 0;
    int directed = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream header(line);
        if (!(header >> n >> anchor >> directed) || (directed != 0 && directed != 1))
            throw ConfigError("edge list header must be 'N anchor_id directed_flag'");
        break;
    }
    if (n == 0) throw ConfigError("edge list is empty or declares zero nodes");

    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        long long i = -1, j = -1;
        if (!(row >> i >> j) || i < 0 || j < 0) throw ConfigError("bad edge line: '" + line + "'");
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
    return Graph::from_edges(n, anchor, edges, directed == 1);
}

} // namespace dcgossip
