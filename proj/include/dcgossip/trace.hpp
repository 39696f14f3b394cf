#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dcgossip/node_protocol.hpp"

namespace dcgossip {

struct MessageRecord {
    std::int64_t time = 0;
    MessageKind kind = MessageKind::beacon;
    NodeId src = 0;
    std::optional<NodeId> dst;
    Payload payload;
};

/// Time series produced by every simulation backend. Index 0 holds x(0).
struct Trace {
    std::vector<Eigen::VectorXd> states;
    std::vector<std::vector<std::uint8_t>> activations; ///< nodes that updated at each iteration
    std::vector<double> drift;
    std::vector<double> disagreement;
    double x_avg = 0.0;
    /// Iterations in one beacon cycle; the convergence window.
    std::size_t cycle_length = 1;

    std::int64_t ticks = 0;
    std::array<std::uint64_t, 5> messages_by_kind{};
    std::vector<MessageRecord> message_log;
    std::uint64_t ignored_messages = 0;

    std::size_t iterations() const noexcept { return states.size(); }
    std::uint64_t messages_sent() const noexcept;
};

} // namespace dcgossip
