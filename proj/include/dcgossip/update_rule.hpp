#pragma once

#include <string_view>

namespace dcgossip {

enum class RuleVariant {
    neighborhood_set,  ///< s(k) = {i} u n_i all adopt the common average
    pure_neighbor,     ///< x_i <- mean of neighbours, zero self weight
    paper_literal,     ///< x_i <- mean of neighbours + previous x_i
    pairwise_baseline, ///< randomized pairwise gossip with mixing weight alpha
};

struct UpdateRule {
    RuleVariant variant = RuleVariant::neighborhood_set;
    double alpha = 0.5;

    /// Throws ConfigError unless alpha lies in (0, 1).
    void validate() const;

    /// Rules whose updates are convex combinations of current states.
    bool convex() const noexcept { return variant != RuleVariant::paper_literal; }
};

RuleVariant parse_rule_variant(std::string_view name);
std::string_view to_string(RuleVariant variant);

} // namespace dcgossip
