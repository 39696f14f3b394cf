#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "dcgossip/graph.hpp"
#include "dcgossip/update_rule.hpp"

namespace dcgossip {

/// Effective matrix when node i alone updates under hold semantics (everyone else keeps
/// their value). neighborhood_set rewrites every row in {i} u n_i.
Eigen::MatrixXd single_node_update_matrix(const Graph& g, const UpdateRule& rule, NodeId i);

/// Effective matrix of one iteration with activation vector `phi`.
///
/// Active nodes update one after another in ascending id, so this is the ordered product
/// M_{i_r} ... M_{i_1}. With `literal_zeroing` it is Phi A instead, which zeroes the rows
/// of sleeping nodes.
Eigen::MatrixXd effective_update_matrix(const Graph& g, const UpdateRule& rule, std::span<const std::uint8_t> phi,
                                        bool literal_zeroing = false);

/// One randomized pairwise exchange between i and j with mixing weight alpha.
Eigen::MatrixXd pairwise_exchange_matrix(std::size_t n, NodeId i, NodeId j, double alpha);

} // namespace dcgossip
