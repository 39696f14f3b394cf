#pragma once

#include <stdexcept>
#include <string>

namespace dcgossip {

/// Malformed or out-of-range configuration or arguments.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Graph does not satisfy a structural precondition (disconnected, self-loop, ...).
class TopologyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Random topology generation ran out of attempts without producing a connected graph.
class UnconnectableTopology : public TopologyError {
  public:
    using TopologyError::TopologyError;
};

/// Protocol violation observed while simulating, e.g. a state request from a non-neighbor.
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// No event fired for a full beacon period plus slack.
class LivenessError : public SimulationError {
  public:
    using SimulationError::SimulationError;
};

/// Eigensolver did not converge.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace dcgossip
