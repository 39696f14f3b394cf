#include "dcgossip/duty_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcgossip/errors.hpp"

namespace dcgossip {

ActivationMode parse_activation_mode(std::string_view name) {
    if (name == "alternating") return ActivationMode::alternating;
    if (name == "stochastic") return ActivationMode::stochastic;
    throw ConfigError("unknown activation mode '" + std::string(name) + "'");
}

std::string_view to_string(ActivationMode mode) {
    return mode == ActivationMode::alternating ? "alternating" : "stochastic";
}

void DutyCycleParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw ConfigError("duty-cycle probabilities must lie in [0, 1]");
    if (mode == ActivationMode::stochastic && !(p + q > 0.0))
        throw ConfigError("stochastic activation needs p + q > 0");
    if (!(t_c > 0.0)) throw ConfigError("t_c must be positive");
    if (!(d_var >= 0.0)) throw ConfigError("d_var must be non-negative");
    if (!(d_mean >= 0.0)) throw ConfigError("d_mean must be non-negative");
}

void DutyCycleParams::validate(double t_w) const {
    validate();
    if (balance_residual(*this, t_w) > 1e-9)
        throw ConfigError("duty-cycle parameters violate p * t_W = t_C * q");
}

double balance_residual(const DutyCycleParams& params, double t_w) {
    return std::abs(params.p * t_w - params.t_c * params.q);
}

double balanced_sleep_probability(double p, double t_w, double t_c) {
    if (!(t_c > 0.0)) throw ConfigError("t_c must be positive");
    return p * t_w / t_c;
}

double wake_time(int m, int layer_count, double d, double t_c) {
    if (layer_count < 1 || m < 1 || m > layer_count) throw ConfigError("layer index out of range");
    if (!(d >= 0.0) || !(t_c > 0.0)) throw ConfigError("wake_time needs d >= 0 and t_c > 0");
    return static_cast<double>(layer_count - m) * (d + t_c);
}

double beacon_period(int layer_count, double d, double t_c, double d_var) {
    if (layer_count < 1 || !(t_c > 0.0) || !(d_var >= 0.0)) throw ConfigError("invalid beacon period arguments");
    return static_cast<double>(layer_count) * (d + t_c) * d_var;
}

double effective_beacon_period(int layer_count, const DutyCycleParams& params) {
    const double literal = beacon_period(layer_count, params.d_mean, params.t_c, params.d_var);
    const double sweep = static_cast<double>(layer_count) * params.slot();
    if (params.beacon_fallback && literal < sweep) return sweep;
    return literal;
}

std::int64_t beacon_period_ticks(int layer_count, const DutyCycleParams& params) {
    const double period = effective_beacon_period(layer_count, params);
    // Guard against 11.999999 turning into 13 after ceil.
    return static_cast<std::int64_t>(std::ceil(period / params.slot() - 1e-9));
}

bool ActivationState::valid() const noexcept {
    return phi.size() == step_parity.size() &&
           std::all_of(phi.begin(), phi.end(), [](std::uint8_t b) { return b <= 1; });
}

std::size_t ActivationState::active_count() const noexcept {
    return static_cast<std::size_t>(std::count(phi.begin(), phi.end(), std::uint8_t{1}));
}

ActivationState step_activation(const ActivationState& state, const DutyCycleParams& params, Rng& rng) {
    ActivationState next = state;
    if (params.mode == ActivationMode::alternating) {
        for (std::size_t i = 0; i < next.size(); ++i) {
            next.phi[i] = next.phi[i] ? 0 : 1;
            ++next.step_parity[i];
        }
        return next;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double u = unit(rng);
        if (next.phi[i] == 0) {
            if (u < params.p) next.phi[i] = 1;
        } else if (u < params.q) {
            next.phi[i] = 0;
        }
        ++next.step_parity[i];
    }
    return next;
}

std::vector<int> activation_increments(const ActivationState& before, const ActivationState& after) {
    if (before.size() != after.size()) throw ConfigError("activation vectors differ in length");
    std::vector<int> z(before.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = int(after.phi[i]) - int(before.phi[i]);
    return z;
}

double stationary_active_fraction(const DutyCycleParams& params) {
    if (!(params.p + params.q > 0.0)) throw ConfigError("stationary fraction undefined for p = q = 0");
    return params.p / (params.p + params.q);
}

double sample_hop_delay(const DutyCycleParams& params, Rng& rng) {
    if (params.d_var == 0.0) return params.d_mean;
    std::normal_distribution<double> delay(params.d_mean, std::sqrt(params.d_var));
    return std::max(0.0, delay(rng));
}

std::int64_t hop_ticks(double delay, const DutyCycleParams& params) {
    const auto ticks = std::llround((delay + params.t_c) / params.slot());
    return std::max<std::int64_t>(1, ticks);
}

} // namespace dcgossip
