#include "dcgossip/node_protocol.hpp"

#include <string>

#include "dcgossip/errors.hpp"

namespace dcgossip {

std::string_view to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::beacon: return "beacon";
    case MessageKind::wake_up: return "wake_up";
    case MessageKind::state_request: return "state_request";
    case MessageKind::state_ack: return "state_ack";
    case MessageKind::state_assign: return "state_assign";
    }
    return "unknown";
}

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::inactive: return "inactive";
    case Phase::awaiting_states: return "awaiting_states";
    case Phase::computing: return "computing";
    }
    return "unknown";
}

bool Message::well_formed() const noexcept {
    switch (kind) {
    case MessageKind::beacon:
    case MessageKind::state_request: return std::holds_alternative<std::monostate>(payload);
    case MessageKind::state_ack:
    case MessageKind::state_assign: return std::holds_alternative<double>(payload);
    case MessageKind::wake_up: return std::holds_alternative<bool>(payload);
    }
    return false;
}

double apply_update_rule(const UpdateRule& rule, double own, const std::map<NodeId, double>& received) {
    if (received.empty()) return own;
    double sum = 0.0;
    for (const auto& [id, value] : received) sum += value;
    const double count = static_cast<double>(received.size());
    switch (rule.variant) {
    case RuleVariant::neighborhood_set: return (own + sum) / (count + 1.0);
    case RuleVariant::pure_neighbor: return sum / count;
    case RuleVariant::paper_literal: return sum / count + own;
    case RuleVariant::pairwise_baseline: return (1.0 - rule.alpha) * own + rule.alpha * (sum / count);
    }
    return own;
}

namespace {

HandlerResult unchanged(const NodeState& node) { return HandlerResult{node, {}, true, false}; }

// All acks are in: compute, write back if needed, flood the next layer.
HandlerResult complete_update(NodeState node, std::int64_t cycle, std::int64_t now, const NodeContext& ctx) {
    HandlerResult result;
    if (ctx.rule.variant == RuleVariant::neighborhood_set && !node.received.empty()) {
        // The initiator keeps the rounding residual of the shared average.
        long double total = node.x;
        for (const auto& [j, value] : node.received) total += value;
        const auto members = static_cast<long double>(node.received.size() + 1);
        const double average = static_cast<double>(total / members);
        node.x = static_cast<double>(total - (members - 1.0L) * average);
        for (const auto& [j, value] : node.received)
            result.emitted.push_back(Message{MessageKind::state_assign, node.id, j, average, now, cycle});
    } else {
        node.x = apply_update_rule(ctx.rule, node.x, node.received);
    }
    node.received.clear();
    node.phi = 1;
    node.phase = Phase::computing;
    node.last_cycle = cycle;
    for (NodeId j : ctx.graph.out_neighbors(node.id))
        if (ctx.layers.layer_of[j] == node.layer + 1)
            result.emitted.push_back(Message{MessageKind::wake_up, node.id, j, true, now, cycle});
    result.state = std::move(node);
    result.updated = true;
    return result;
}

} // namespace

HandlerResult start_exchange(const NodeState& node, std::int64_t cycle, std::int64_t now, const NodeContext& ctx) {
    NodeState next = node;
    next.phase = Phase::awaiting_states;
    next.pending_acks.clear();
    next.received.clear();
    const auto& sources = ctx.graph.in_neighbors(node.id);
    if (sources.empty()) return complete_update(std::move(next), cycle, now, ctx);

    HandlerResult result;
    for (NodeId j : sources) {
        next.pending_acks.insert(j);
        result.emitted.push_back(Message{MessageKind::state_request, node.id, j, std::monostate{}, now, cycle});
    }
    result.state = std::move(next);
    return result;
}

HandlerResult on_beacon(const NodeState& node, const Message& msg, const NodeContext& ctx) {
    if (node.layer != 1 || node.phase != Phase::inactive || msg.cycle <= node.last_cycle) return unchanged(node);
    return start_exchange(node, msg.cycle, msg.deliver_at, ctx);
}

HandlerResult on_wake_up(const NodeState& node, const Message& msg, const NodeContext& ctx) {
    const bool bit = std::holds_alternative<bool>(msg.payload) && std::get<bool>(msg.payload);
    const bool complement = bit && node.phi == 0;
    if (node.phase != Phase::inactive || !complement || msg.cycle <= node.last_cycle) return unchanged(node);
    return start_exchange(node, msg.cycle, msg.deliver_at, ctx);
}

HandlerResult on_state_request(const NodeState& node, const Message& msg, const NodeContext& ctx) {
    if (!ctx.graph.has_edge(node.id, msg.src))
        throw SimulationError("state request from node " + std::to_string(msg.src) + " which cannot hear node " +
                              std::to_string(node.id));
    HandlerResult result{node, {}, false, false};
    result.emitted.push_back(Message{MessageKind::state_ack, node.id, msg.src, node.x, msg.deliver_at, msg.cycle});
    return result;
}

HandlerResult on_state_ack(const NodeState& node, const Message& msg, const NodeContext& ctx) {
    if (node.phase != Phase::awaiting_states || !node.pending_acks.contains(msg.src) ||
        !std::holds_alternative<double>(msg.payload))
        return unchanged(node);
    NodeState next = node;
    next.pending_acks.erase(msg.src);
    next.received[msg.src] = std::get<double>(msg.payload);
    if (!next.pending_acks.empty()) return HandlerResult{std::move(next), {}, false, false};
    return complete_update(std::move(next), msg.cycle, msg.deliver_at, ctx);
}

HandlerResult on_state_assign(const NodeState& node, const Message& msg, const NodeContext&) {
    if (!std::holds_alternative<double>(msg.payload)) return unchanged(node);
    NodeState next = node;
    next.x = std::get<double>(msg.payload);
    return HandlerResult{std::move(next), {}, false, false};
}

NodeState finish_compute(const NodeState& node) {
    NodeState next = node;
    if (next.phase == Phase::computing) {
        next.phase = Phase::inactive;
        next.phi = 0;
    }
    return next;
}

HandlerResult handle(const NodeState& node, const Message& msg, const NodeContext& ctx) {
    switch (msg.kind) {
    case MessageKind::beacon: return on_beacon(node, msg, ctx);
    case MessageKind::wake_up: return on_wake_up(node, msg, ctx);
    case MessageKind::state_request: return on_state_request(node, msg, ctx);
    case MessageKind::state_ack: return on_state_ack(node, msg, ctx);
    case MessageKind::state_assign: return on_state_assign(node, msg, ctx);
    }
    return unchanged(node);
}

} // namespace dcgossip
