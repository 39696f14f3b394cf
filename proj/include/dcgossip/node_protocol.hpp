#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "dcgossip/graph.hpp"
#include "dcgossip/update_rule.hpp"

namespace dcgossip {

enum class Phase { inactive, awaiting_states, computing };

enum class MessageKind {
    beacon,        ///< anchor restarts the sweep
    wake_up,       ///< status-bit flood to the next layer, carries phi
    state_request, ///< ask a neighbour for its estimate
    state_ack,     ///< reply carrying the estimate
    state_assign,  ///< neighborhood_set write-back of the common average
};

std::string_view to_string(MessageKind kind);
std::string_view to_string(Phase phase);

using Payload = std::variant<std::monostate, double, bool>;

struct Message {
    MessageKind kind = MessageKind::beacon;
    NodeId src = 0;
    std::optional<NodeId> dst; ///< nullopt = broadcast
    Payload payload;
    std::int64_t deliver_at = 0;
    std::int64_t cycle = 0; ///< beacon cycle the message belongs to

    /// state_ack and state_assign carry a real, wake_up a bit, beacon and request nothing.
    bool well_formed() const noexcept;
};

struct NodeState {
    NodeId id = 0;
    double x = 0.0;
    std::uint8_t phi = 0;
    int layer = 1;
    Phase phase = Phase::inactive;
    std::set<NodeId> pending_acks;
    std::map<NodeId, double> received;
    std::int64_t last_cycle = -1; ///< cycle of the most recent completed update

    bool valid() const noexcept { return phi <= 1 && (phase != Phase::inactive || pending_acks.empty()); }
};

/// Read-only view of the network a node consults while handling messages.
struct NodeContext {
    const Graph& graph;
    const LayerAssignment& layers;
    UpdateRule rule;
};

struct HandlerResult {
    NodeState state;
    std::vector<Message> emitted;
    bool ignored = false; ///< message had no effect (spurious, duplicate or unsolicited)
    bool updated = false; ///< the node computed a new estimate
};

/// Wakes the node and requests states from every node it averages over. A node with no
/// one to poll completes its update immediately.
HandlerResult start_exchange(const NodeState& node, std::int64_t cycle, std::int64_t now, const NodeContext& ctx);

/// Layer-1 nodes (including the anchor) start an exchange; everyone else ignores it.
HandlerResult on_beacon(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// Inactive node with phi = 0 receiving phi = 1 wakes, once per cycle.
HandlerResult on_wake_up(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// Answers with the current estimate regardless of phase. Throws SimulationError when the
/// requester cannot hear this node.
HandlerResult on_state_request(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// Records the payload; the final ack triggers the update, write-back and wake-up flood.
HandlerResult on_state_ack(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// End of the compute slot: a computing node returns to sleep with phi = 0.
NodeState finish_compute(const NodeState& node);

/// Adopts the polled average.
HandlerResult on_state_assign(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// Dispatch on `msg.kind`.
HandlerResult handle(const NodeState& node, const Message& msg, const NodeContext& ctx);

/// Estimate after averaging: `own` is x_i, `received` the neighbours' payloads.
double apply_update_rule(const UpdateRule& rule, double own, const std::map<NodeId, double>& received);

} // namespace dcgossip
