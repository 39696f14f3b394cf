#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dcgossip/duty_cycle.hpp"
#include "dcgossip/graph.hpp"
#include "dcgossip/trace.hpp"
#include "dcgossip/update_rule.hpp"

namespace dcgossip {

/// One activation vector per iteration, entries 0/1.
using ActivationSequence = std::vector<std::vector<std::uint8_t>>;

struct RunConfig {
    Graph graph;
    DutyCycleParams duty{};
    UpdateRule rule{};
    /// Explicit x(0); empty draws uniform [0, 100) per node from the seed.
    std::vector<double> initial_states{};
    std::size_t max_iterations = 400;
    std::uint64_t seed = 1;
    double tolerance = 1e-6;
    /// Matrix backend: effective matrix Phi_k A, sleeping rows zeroed.
    bool literal_zeroing = false;
    bool record_messages = false;
    bool stop_on_convergence = true;

    void validate() const;
};

/// x(0) for the config, identical for every backend.
Eigen::VectorXd initial_state_vector(const RunConfig& cfg);

/// Stacked switched-system step: Y_k = W_k Y_{k-1} + D_k with Y = [x; Phi 1], D = [0; Z_k].
struct SwitchedSystem {
    Eigen::MatrixXd a;   ///< averaging matrix for the rule
    Eigen::VectorXd phi; ///< diagonal of Phi_k
    Eigen::MatrixXd w;   ///< [[A_eff, 0], [0, I]], 2N x 2N
    Eigen::VectorXd y;
    Eigen::VectorXd d;
};

/// W_k for activation `phi`. The upper-left block is the hold-semantics effective matrix,
/// or Phi_k A when `literal_zeroing` is set.
Eigen::MatrixXd switched_weight_matrix(const Graph& g, const UpdateRule& rule, std::span<const std::uint8_t> phi,
                                       bool literal_zeroing);

/// D_k = [0; phi - phi_prev].
Eigen::VectorXd switched_drive_vector(std::span<const std::uint8_t> phi_prev, std::span<const std::uint8_t> phi);

SwitchedSystem switched_step(const Graph& g, const UpdateRule& rule, const Eigen::VectorXd& y_prev,
                             std::span<const std::uint8_t> phi_prev, std::span<const std::uint8_t> phi,
                             bool literal_zeroing);

/// Message-passing simulation of the layered wake-up protocol: beacons, wake-up flooding,
/// request/ack exchanges. Stops after max_iterations update ticks or on convergence.
/// Throws LivenessError when nothing happens for a beacon period plus slack.
Trace run_agent_sim(const RunConfig& cfg);

/// Same node logic, but the nodes that update at tick k are taken from `script[k-1]`
/// instead of beacons and wake-ups. Runs exactly max_iterations ticks.
Trace run_agent_sim(const RunConfig& cfg, const ActivationSequence& script);

/// Iterates the stacked switched system for max_iterations steps.
Trace run_matrix_sim(const RunConfig& cfg, const ActivationSequence& activations);

/// Y_k from the explicit product-sum solution, composing W_j in time order.
Eigen::VectorXd closed_form_state(const RunConfig& cfg, const ActivationSequence& activations, std::size_t k);

/// Randomized pairwise gossip: one uniform node and one uniform neighbour mix per iteration.
Trace run_pairwise_baseline(const RunConfig& cfg);

/// Layer-by-layer schedule: iteration k activates layer ((k-1) mod L) + 1. Stochastic
/// duty cycling additionally masks each node by its two-state chain.
ActivationSequence layered_schedule(const LayerAssignment& layers, std::size_t iterations,
                                    const DutyCycleParams& duty, Rng& rng);

} // namespace dcgossip
