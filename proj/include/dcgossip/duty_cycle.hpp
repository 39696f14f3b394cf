#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dcgossip {

using Rng = std::mt19937_64;

enum class ActivationMode {
    alternating, ///< deterministic +1/-1 random walk increments, phi toggles every step
    stochastic,  ///< two-state birth-death chain: wake w.p. p, sleep w.p. q
};

ActivationMode parse_activation_mode(std::string_view name);
std::string_view to_string(ActivationMode mode);

/// Wake/sleep timing and transition probabilities. Times share one arbitrary unit.
struct DutyCycleParams {
    double d_mean = 0.0; ///< one-hop delay mean
    double d_var = 0.0;  ///< one-hop delay variance
    double t_c = 1.0;    ///< receive-and-compute time
    double p = 0.5;      ///< sleep -> wake probability
    double q = 0.5;      ///< wake -> sleep probability
    ActivationMode mode = ActivationMode::alternating;
    /// Replace a beacon period shorter than one layer sweep by L (d + t_C).
    bool beacon_fallback = true;

    /// Range checks; throws ConfigError.
    void validate() const;
    /// Range checks plus the balance relation p t_W = t_C q within 1e-9.
    void validate(double t_w) const;

    /// Duration of one layer slot, d_mean + t_C.
    double slot() const noexcept { return d_mean + t_c; }
};

/// |p t_W - t_C q|.
double balance_residual(const DutyCycleParams& params, double t_w);

/// Sleep probability that balances p against a given wake time: q = p t_W / t_C.
double balanced_sleep_probability(double p, double t_w, double t_c);

/// Sleep-to-wake time of a layer-m node: (L - m)(d + t_C).
double wake_time(int m, int layer_count, double d, double t_c);

/// Beacon period as printed: L (d + t_C) sigma_d^2. Zero when sigma_d^2 = 0.
double beacon_period(int layer_count, double d, double t_c, double d_var);

/// Beacon period actually scheduled. Uses L (d + t_C) when the literal value falls below
/// one full layer sweep and `fallback` is on.
double effective_beacon_period(int layer_count, const DutyCycleParams& params);

/// Beacon period in simulation ticks (one tick = one slot). May be 0 without fallback.
std::int64_t beacon_period_ticks(int layer_count, const DutyCycleParams& params);

/// Per-node activation bits phi_i(k) plus the step counter driving alternation.
struct ActivationState {
    std::vector<std::uint8_t> phi;
    std::vector<std::uint64_t> step_parity;

    explicit ActivationState(std::size_t n = 0) : phi(n, 0), step_parity(n, 0) {}

    std::size_t size() const noexcept { return phi.size(); }
    bool valid() const noexcept;
    std::size_t active_count() const noexcept;
};

/// phi(k) = phi(k-1) + z(k). Alternating mode toggles every node; stochastic mode draws
/// one uniform per node (in node order) from `rng`.
ActivationState step_activation(const ActivationState& state, const DutyCycleParams& params, Rng& rng);

/// Increment vector Z_k = phi(k) - phi(k-1), entries in {-1, 0, 1}.
std::vector<int> activation_increments(const ActivationState& before, const ActivationState& after);

/// Long-run fraction of time awake for the two-state chain, p / (p + q).
double stationary_active_fraction(const DutyCycleParams& params);

/// d ~ Normal(d_mean, d_var) truncated at 0.
double sample_hop_delay(const DutyCycleParams& params, Rng& rng);

/// Hop-plus-compute latency in ticks, at least one.
std::int64_t hop_ticks(double delay, const DutyCycleParams& params);

} // namespace dcgossip
