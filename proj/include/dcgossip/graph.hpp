#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcgossip/update_rule.hpp"

namespace dcgossip {

using NodeId = std::size_t;

/// Sensor network topology over N nodes, one of which hosts the gateway (anchor).
///
/// `adjacency(i, j) == true` means i can transmit to j. Undirected graphs are stored
/// symmetrically. Instances are always connected: every node is reachable from the
/// anchor along edge directions.
class Graph {
  public:
    /// Validates and builds. Throws TopologyError on self-loops, asymmetric undirected
    /// input, an out-of-range anchor or a disconnected graph.
    static Graph from_adjacency(std::size_t node_count, NodeId anchor, std::vector<std::uint8_t> adjacency,
                                bool directed);

    static Graph from_edges(std::size_t node_count, NodeId anchor, std::span<const std::pair<NodeId, NodeId>> edges,
                            bool directed);

    std::size_t size() const noexcept { return node_count_; }
    NodeId anchor() const noexcept { return anchor_; }
    bool directed() const noexcept { return directed_; }

    bool has_edge(NodeId from, NodeId to) const;

    /// Nodes i transmits to (n_i).
    const std::vector<NodeId>& out_neighbors(NodeId i) const;
    /// Nodes i receives from; the set a node averages over.
    const std::vector<NodeId>& in_neighbors(NodeId i) const;

    /// Edge list, each undirected edge once with i < j.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    /// Dense 0/1 adjacency.
    Eigen::MatrixXd adjacency_matrix() const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.node_count_ == b.node_count_ && a.anchor_ == b.anchor_ && a.directed_ == b.directed_ &&
               a.adjacency_ == b.adjacency_;
    }

  private:
    Graph() = default;
    void check_node(NodeId i) const;

    std::size_t node_count_ = 0;
    NodeId anchor_ = 0;
    bool directed_ = false;
    std::vector<std::uint8_t> adjacency_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
};

enum class TopologyKind { chain, star, circular, random_geometric, complete };

enum class RandomModel { geometric, erdos_renyi };

struct TopologyParams {
    NodeId anchor = 0;
    bool directed = false;       ///< circular only
    double side = 1.0;           ///< placement square side, random_geometric
    double radius = 0.3;         ///< connection radius, random_geometric
    RandomModel model = RandomModel::geometric;
    double edge_probability = 0.1; ///< erdos_renyi only
    int max_attempts = 100;
};

TopologyKind parse_topology_kind(std::string_view name);
std::string_view to_string(TopologyKind kind);

/// Deterministic for a fixed seed. Star and chain number the center / first node 0.
/// Random topologies are re-drawn until connected; UnconnectableTopology after
/// `params.max_attempts` failures.
Graph build_topology(TopologyKind kind, std::size_t n, const TopologyParams& params, std::uint64_t seed);

/// n_i = {j : (i, j) in e}.
std::vector<NodeId> neighborhood(const Graph& g, NodeId i);

struct LayerAssignment {
    std::vector<int> layer_of;   ///< 1..L per node
    int layer_count = 0;         ///< L
    std::vector<std::size_t> layer_sizes; ///< q_1..q_L

    std::vector<NodeId> nodes_in(int layer) const;
};

/// Layer = BFS hop distance from the anchor, with the anchor itself in layer 1
/// (it reacts to its own beacon together with its neighbours).
LayerAssignment assign_layers(const Graph& g);

/// Row-stochastic averaging matrix for the rule. Row i weights the nodes i averages over
/// (in-neighbours, plus i for neighborhood_set and pairwise_baseline).
Eigen::MatrixXd consensus_weight_matrix(const Graph& g, const UpdateRule& rule);

/// Plain-text edge list: "N anchor directed" header, then one "i j" pair per line.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

} // namespace dcgossip
