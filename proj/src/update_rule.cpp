#include "dcgossip/update_rule.hpp"

#include <string>

#include "dcgossip/errors.hpp"

namespace dcgossip {

void UpdateRule::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rule alpha must lie in (0, 1)");
}

RuleVariant parse_rule_variant(std::string_view name) {
    if (name == "neighborhood_set") return RuleVariant::neighborhood_set;
    if (name == "pure_neighbor") return RuleVariant::pure_neighbor;
    if (name == "paper_literal") return RuleVariant::paper_literal;
    if (name == "pairwise_baseline" || name == "pairwise") return RuleVariant::pairwise_baseline;
    throw ConfigError("unknown update rule '" + std::string(name) + "'");
}

std::string_view to_string(RuleVariant variant) {
    switch (variant) {
    case RuleVariant::neighborhood_set: return "neighborhood_set";
    case RuleVariant::pure_neighbor: return "pure_neighbor";
    case RuleVariant::paper_literal: return "paper_literal";
    case RuleVariant::pairwise_baseline: return "pairwise_baseline";
    }
    return "unknown";
}

} // namespace dcgossip
