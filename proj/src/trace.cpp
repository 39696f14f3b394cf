#include "dcgossip/trace.hpp"

#include <numeric>

namespace dcgossip {

std::uint64_t Trace::messages_sent() const noexcept {
    return std::accumulate(messages_by_kind.begin(), messages_by_kind.end(), std::uint64_t{0});
}

} // namespace dcgossip
