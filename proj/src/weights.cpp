#include "dcgossip/weights.hpp"

#include "dcgossip/errors.hpp"

namespace dcgossip {

Eigen::MatrixXd single_node_update_matrix(const Graph& g, const UpdateRule& rule, NodeId i) {
    rule.validate();
    const auto n = static_cast<Eigen::Index>(g.size());
    const auto row = static_cast<Eigen::Index>(i);
    if (row >= n) throw std::out_of_range("node index out of range");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    const auto& from = g.in_neighbors(i);
    if (from.empty()) return m;

    const double deg = static_cast<double>(from.size());
    switch (rule.variant) {
    case RuleVariant::neighborhood_set: {
        std::vector<Eigen::Index> members{row};
        for (NodeId j : from) members.push_back(static_cast<Eigen::Index>(j));
        const double w = 1.0 / static_cast<double>(members.size());
        for (Eigen::Index r : members) {
            m.row(r).setZero();
            for (Eigen::Index c : members) m(r, c) = w;
        }
        break;
    }
    case RuleVariant::pure_neighbor:
        m.row(row).setZero();
        for (NodeId j : from) m(row, static_cast<Eigen::Index>(j)) = 1.0 / deg;
        break;
    case RuleVariant::paper_literal:
        for (NodeId j : from) m(row, static_cast<Eigen::Index>(j)) = 1.0 / deg;
        break;
    case RuleVariant::pairwise_baseline:
        m(row, row) = 1.0 - rule.alpha;
        for (NodeId j : from) m(row, static_cast<Eigen::Index>(j)) = rule.alpha / deg;
        break;
    }
    return m;
}

Eigen::MatrixXd effective_update_matrix(const Graph& g, const UpdateRule& rule, std::span<const std::uint8_t> phi,
                                        bool literal_zeroing) {
    const auto n = static_cast<Eigen::Index>(g.size());
    if (phi.size() != g.size()) throw ConfigError("activation vector length does not match node count");
    if (literal_zeroing) {
        Eigen::MatrixXd a = consensus_weight_matrix(g, rule);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!phi[static_cast<std::size_t>(i)]) a.row(i).setZero();
        return a;
    }
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
    for (NodeId i = 0; i < g.size(); ++i)
        if (phi[i]) product = single_node_update_matrix(g, rule, i) * product;
    return product;
}

Eigen::MatrixXd pairwise_exchange_matrix(std::size_t n, NodeId i, NodeId j, double alpha) {
    if (i >= n || j >= n || i == j) throw ConfigError("pairwise exchange needs two distinct valid nodes");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    w(a, a) = 1.0 - alpha;
    w(a, b) = alpha;
    w(b, b) = 1.0 - alpha;
    w(b, a) = alpha;
    return w;
}

} // namespace dcgossip
