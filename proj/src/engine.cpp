#include "dcgossip/engine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <tuple>

#include "dcgossip/analysis.hpp"
#include "dcgossip/errors.hpp"
#include "dcgossip/node_protocol.hpp"
#include "dcgossip/weights.hpp"

namespace dcgossip {

namespace {

// Stream for delays and duty-cycle draws, distinct from the x(0) stream.
constexpr std::uint64_t kDynamicsStream = 0x9E3779B97F4A7C15ULL;

void record_iteration(Trace& trace, const Graph& g, Eigen::VectorXd x, std::vector<std::uint8_t> active) {
    trace.drift.push_back(drift_of(x, trace.x_avg));
    trace.disagreement.push_back(disagreement_of(x, g));
    trace.states.push_back(std::move(x));
    trace.activations.push_back(std::move(active));
}

Trace start_trace(const RunConfig& cfg, const Eigen::VectorXd& x0, std::size_t cycle_length) {
    Trace trace;
    trace.x_avg = x0.mean();
    trace.cycle_length = cycle_length;
    record_iteration(trace, cfg.graph, x0, std::vector<std::uint8_t>(cfg.graph.size(), 0));
    return trace;
}

bool converged_tail(const Trace& trace, double tol) {
    const std::size_t window = std::max<std::size_t>(1, trace.cycle_length);
    if (trace.disagreement.size() < window) return false;
    return std::all_of(trace.disagreement.end() - static_cast<std::ptrdiff_t>(window), trace.disagreement.end(),
                       [tol](double e) { return e < tol; });
}

void check_sequence(const RunConfig& cfg, const ActivationSequence& seq, std::size_t needed) {
    if (seq.size() < needed) throw ConfigError("activation sequence shorter than the requested iterations");
    for (std::size_t k = 0; k < needed; ++k) {
        if (seq[k].size() != cfg.graph.size()) throw ConfigError("activation vector length does not match graph");
        for (auto b : seq[k])
            if (b > 1) throw ConfigError("activation entries must be 0 or 1");
    }
}

class AgentSimulation {
  public:
    AgentSimulation(const RunConfig& cfg, const ActivationSequence* script)
        : cfg_(cfg), script_(script), layers_(assign_layers(cfg.graph)), ctx_{cfg.graph, layers_, cfg.rule},
          rng_(cfg.seed ^ kDynamicsStream), gate_(cfg.graph.size()) {
        const Eigen::VectorXd x0 = initial_state_vector(cfg);
        nodes_.resize(cfg.graph.size());
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            nodes_[i].id = i;
            nodes_[i].x = x0[static_cast<Eigen::Index>(i)];
            nodes_[i].layer = layers_.layer_of[i];
        }
        // Stochastic duty cycling starts with every radio awake.
        if (cfg.duty.mode == ActivationMode::stochastic) std::fill(gate_.phi.begin(), gate_.phi.end(), 1);
        period_ = beacon_period_ticks(layers_.layer_count, cfg.duty);
        trace_ = start_trace(cfg, x0, static_cast<std::size_t>(layers_.layer_count));
    }

    Trace run() {
        if (script_) {
            check_sequence(cfg_, *script_, cfg_.max_iterations);
            for (std::int64_t t = 1; t <= static_cast<std::int64_t>(cfg_.max_iterations); ++t) run_scripted_tick(t);
            trace_.ticks = static_cast<std::int64_t>(cfg_.max_iterations);
            return std::move(trace_);
        }

        const std::int64_t L = layers_.layer_count;
        const std::int64_t liveness_window = (period_ > 0 ? period_ : L) + L + 1;
        const std::int64_t tick_cap =
            static_cast<std::int64_t>(cfg_.max_iterations) * std::max<std::int64_t>(period_, L) + L + 1;
        std::int64_t next_beacon = 0;
        std::int64_t last_activity = 0;

        for (std::int64_t t = 0; t <= tick_cap; ++t) {
            bool activity = false;
            if (t == next_beacon) {
                emit_beacon(t);
                activity = true;
                next_beacon = period_ > 0 ? t + period_ : -1;
            }
            if (cfg_.duty.mode == ActivationMode::stochastic && t > 0) gate_ = step_activation(gate_, cfg_.duty, rng_);

            std::vector<std::uint8_t> updated(nodes_.size(), 0);
            auto due = take_due(t);
            activity = activity || !due.empty();
            for (const Message& msg : due) process_trigger(msg, t, updated);
            end_of_tick();

            if (activity) last_activity = t;
            if (t - last_activity > liveness_window)
                throw LivenessError("no protocol event for " + std::to_string(t - last_activity) + " ticks");

            if (std::any_of(updated.begin(), updated.end(), [](auto b) { return b != 0; })) {
                record_state(std::move(updated));
                if (trace_.iterations() > cfg_.max_iterations) break;
                if (cfg_.stop_on_convergence && converged_tail(trace_, cfg_.tolerance)) break;
            }
            trace_.ticks = t;
        }
        return std::move(trace_);
    }

  private:
    void count(const Message& msg, std::int64_t t) {
        ++trace_.messages_by_kind[static_cast<std::size_t>(msg.kind)];
        if (cfg_.record_messages) trace_.message_log.push_back(MessageRecord{t, msg.kind, msg.src, msg.dst, msg.payload});
    }

    void emit_beacon(std::int64_t t) {
        ++cycle_;
        const NodeId anchor = cfg_.graph.anchor();
        Message beacon{MessageKind::beacon, anchor, std::nullopt, std::monostate{}, t, cycle_};
        count(beacon, t);
        // The anchor hears its own beacon locally, one compute slot later.
        schedule(Message{MessageKind::beacon, anchor, anchor, std::monostate{}, t + 1, cycle_});
        for (NodeId j : cfg_.graph.out_neighbors(anchor)) {
            const auto delay = hop_ticks(sample_hop_delay(cfg_.duty, rng_), cfg_.duty);
            schedule(Message{MessageKind::beacon, anchor, j, std::monostate{}, t + delay, cycle_});
        }
    }

    void schedule(Message msg) { future_[msg.deliver_at].push_back(std::move(msg)); }

    std::vector<Message> take_due(std::int64_t t) {
        auto it = future_.find(t);
        if (it == future_.end()) return {};
        std::vector<Message> due = std::move(it->second);
        future_.erase(it);
        std::stable_sort(due.begin(), due.end(), [](const Message& a, const Message& b) {
            return std::tuple(*a.dst, a.src, a.kind, a.cycle) < std::tuple(*b.dst, b.src, b.kind, b.cycle);
        });
        return due;
    }

    void process_trigger(const Message& msg, std::int64_t t, std::vector<std::uint8_t>& updated) {
        const NodeId dst = *msg.dst;
        if (cfg_.duty.mode == ActivationMode::stochastic && gate_.phi[dst] == 0) {
            ++trace_.ignored_messages;
            return;
        }
        apply(dst, handle(nodes_[dst], msg, ctx_), t, updated);
    }

    // Installs a handler result and runs the resulting exchange to completion. Requests,
    // acks and write-backs travel within the current slot; wake-ups go to later ticks.
    void apply(NodeId owner, HandlerResult result, std::int64_t t, std::vector<std::uint8_t>& updated) {
        if (result.ignored) ++trace_.ignored_messages;
        if (result.updated) updated[owner] = 1;
        nodes_[owner] = std::move(result.state);
        std::deque<Message> local(result.emitted.begin(), result.emitted.end());
        while (!local.empty()) {
            Message msg = std::move(local.front());
            local.pop_front();
            if (msg.kind == MessageKind::wake_up) {
                if (script_) continue; // the script replaces the flood
                count(msg, t);
                msg.deliver_at = t + hop_ticks(sample_hop_delay(cfg_.duty, rng_), cfg_.duty);
                schedule(std::move(msg));
                continue;
            }
            count(msg, t);
            const NodeId dst = *msg.dst;
            HandlerResult next = handle(nodes_[dst], msg, ctx_);
            if (next.ignored) ++trace_.ignored_messages;
            if (next.updated) updated[dst] = 1;
            nodes_[dst] = std::move(next.state);
            local.insert(local.end(), next.emitted.begin(), next.emitted.end());
        }
    }

    void run_scripted_tick(std::int64_t t) {
        const auto& phi = (*script_)[static_cast<std::size_t>(t - 1)];
        std::vector<std::uint8_t> updated(nodes_.size(), 0);
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            if (!phi[i]) continue;
            apply(i, start_exchange(nodes_[i], t, t, ctx_), t, updated);
        }
        end_of_tick();
        record_state(std::move(updated));
    }

    void end_of_tick() {
        for (auto& node : nodes_) node = finish_compute(node);
    }

    void record_state(std::vector<std::uint8_t> updated) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(nodes_.size()));
        for (NodeId i = 0; i < nodes_.size(); ++i) x[static_cast<Eigen::Index>(i)] = nodes_[i].x;
        record_iteration(trace_, cfg_.graph, std::move(x), std::move(updated));
    }

    const RunConfig& cfg_;
    const ActivationSequence* script_;
    LayerAssignment layers_;
    NodeContext ctx_;
    Rng rng_;
    ActivationState gate_;
    std::vector<NodeState> nodes_;
    std::map<std::int64_t, std::vector<Message>> future_;
    std::int64_t period_ = 0;
    std::int64_t cycle_ = 0;
    Trace trace_;
};

} // namespace

void RunConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    rule.validate();
    duty.validate();
    if (!initial_states.empty() && initial_states.size() != graph.size())
        throw ConfigError("initial state vector length does not match node count");
}

Eigen::VectorXd initial_state_vector(const RunConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(cfg.graph.size());
    Eigen::VectorXd x(n);
    if (!cfg.initial_states.empty()) {
        if (cfg.initial_states.size() != cfg.graph.size())
            throw ConfigError("initial state vector length does not match node count");
        for (Eigen::Index i = 0; i < n; ++i) x[i] = cfg.initial_states[static_cast<std::size_t>(i)];
        return x;
    }
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> measurement(0.0, 100.0);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = measurement(rng);
    return x;
}

Eigen::MatrixXd switched_weight_matrix(const Graph& g, const UpdateRule& rule, std::span<const std::uint8_t> phi,
                                       bool literal_zeroing) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    w.topLeftCorner(n, n) = effective_update_matrix(g, rule, phi, literal_zeroing);
    w.bottomRightCorner(n, n).setIdentity();
    return w;
}

Eigen::VectorXd switched_drive_vector(std::span<const std::uint8_t> phi_prev, std::span<const std::uint8_t> phi) {
    if (phi_prev.size() != phi.size()) throw ConfigError("activation vectors differ in length");
    const auto n = static_cast<Eigen::Index>(phi.size());
    Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
        d[n + i] = double(phi[static_cast<std::size_t>(i)]) - double(phi_prev[static_cast<std::size_t>(i)]);
    return d;
}

SwitchedSystem switched_step(const Graph& g, const UpdateRule& rule, const Eigen::VectorXd& y_prev,
                             std::span<const std::uint8_t> phi_prev, std::span<const std::uint8_t> phi,
                             bool literal_zeroing) {
    const auto n = static_cast<Eigen::Index>(g.size());
    if (y_prev.size() != 2 * n) throw ConfigError("stacked state has the wrong dimension");
    SwitchedSystem sys;
    sys.a = consensus_weight_matrix(g, rule);
    sys.phi = Eigen::VectorXd(n);
    for (Eigen::Index i = 0; i < n; ++i) sys.phi[i] = phi[static_cast<std::size_t>(i)];
    sys.w = switched_weight_matrix(g, rule, phi, literal_zeroing);
    sys.d = switched_drive_vector(phi_prev, phi);
    sys.y = sys.w * y_prev + sys.d;
    return sys;
}

Trace run_agent_sim(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.rule.variant == RuleVariant::pairwise_baseline)
        throw ConfigError("pairwise_baseline runs through run_pairwise_baseline");
    return AgentSimulation(cfg, nullptr).run();
}

Trace run_agent_sim(const RunConfig& cfg, const ActivationSequence& script) {
    cfg.validate();
    return AgentSimulation(cfg, &script).run();
}

Trace run_matrix_sim(const RunConfig& cfg, const ActivationSequence& activations) {
    cfg.validate();
    check_sequence(cfg, activations, cfg.max_iterations);
    const auto n = static_cast<Eigen::Index>(cfg.graph.size());
    const Eigen::VectorXd x0 = initial_state_vector(cfg);
    Trace trace = start_trace(cfg, x0, static_cast<std::size_t>(assign_layers(cfg.graph).layer_count));

    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
    y.head(n) = x0;
    std::vector<std::uint8_t> phi_prev(cfg.graph.size(), 0);
    for (std::size_t k = 0; k < cfg.max_iterations; ++k) {
        const auto& phi = activations[k];
        y = switched_step(cfg.graph, cfg.rule, y, phi_prev, phi, cfg.literal_zeroing).y;
        record_iteration(trace, cfg.graph, y.head(n), phi);
        phi_prev = phi;
    }
    trace.ticks = static_cast<std::int64_t>(cfg.max_iterations);
    return trace;
}

Eigen::VectorXd closed_form_state(const RunConfig& cfg, const ActivationSequence& activations, std::size_t k) {
    cfg.validate();
    if (k > cfg.max_iterations) throw ConfigError("closed form requested beyond max_iterations");
    check_sequence(cfg, activations, k);
    const auto n = static_cast<Eigen::Index>(cfg.graph.size());
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(2 * n);
    y0.head(n) = initial_state_vector(cfg);

    std::vector<Eigen::MatrixXd> w(k + 1);
    std::vector<Eigen::VectorXd> d(k + 1);
    const std::vector<std::uint8_t> none(cfg.graph.size(), 0);
    for (std::size_t j = 1; j <= k; ++j) {
        w[j] = switched_weight_matrix(cfg.graph, cfg.rule, activations[j - 1], cfg.literal_zeroing);
        d[j] = switched_drive_vector(j == 1 ? none : activations[j - 2], activations[j - 1]);
    }

    // Y_k = (W_k ... W_1) Y_0 + sum_j (W_k ... W_{j+1}) D_j, suffix products built from the left.
    Eigen::MatrixXd suffix = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    Eigen::VectorXd forced = Eigen::VectorXd::Zero(2 * n);
    for (std::size_t j = k; j >= 1; --j) {
        forced += suffix * d[j];
        suffix = suffix * w[j];
    }
    return suffix * y0 + forced;
}

Trace run_pairwise_baseline(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.graph.directed()) throw ConfigError("pairwise baseline needs an undirected graph");
    const Eigen::VectorXd x0 = initial_state_vector(cfg);
    Trace trace = start_trace(cfg, x0, cfg.graph.size());
    Rng rng(cfg.seed ^ kDynamicsStream);
    Eigen::VectorXd x = x0;
    const double alpha = cfg.rule.alpha;
    std::uniform_int_distribution<std::size_t> pick_node(0, cfg.graph.size() - 1);

    for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
        const NodeId i = pick_node(rng);
        const auto& nbrs = cfg.graph.out_neighbors(i);
        std::uniform_int_distribution<std::size_t> pick_nbr(0, nbrs.size() - 1);
        const NodeId j = nbrs[pick_nbr(rng)];
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        const double xi = x[a], xj = x[b];
        x[a] = (1.0 - alpha) * xi + alpha * xj;
        x[b] = alpha * xi + (1.0 - alpha) * xj;

        // i sends its estimate, j answers with its own.
        trace.messages_by_kind[static_cast<std::size_t>(MessageKind::state_request)] += 1;
        trace.messages_by_kind[static_cast<std::size_t>(MessageKind::state_ack)] += 1;
        if (cfg.record_messages) {
            trace.message_log.push_back(
                MessageRecord{static_cast<std::int64_t>(k), MessageKind::state_request, i, j, xi});
            trace.message_log.push_back(MessageRecord{static_cast<std::int64_t>(k), MessageKind::state_ack, j, i, xj});
        }

        std::vector<std::uint8_t> active(cfg.graph.size(), 0);
        active[i] = active[j] = 1;
        record_iteration(trace, cfg.graph, x, std::move(active));
        trace.ticks = static_cast<std::int64_t>(k);
        if (cfg.stop_on_convergence && converged_tail(trace, cfg.tolerance)) break;
    }
    return trace;
}

ActivationSequence layered_schedule(const LayerAssignment& layers, std::size_t iterations,
                                    const DutyCycleParams& duty, Rng& rng) {
    const std::size_t n = layers.layer_of.size();
    ActivationSequence seq;
    seq.reserve(iterations);
    ActivationState gate(n);
    if (duty.mode == ActivationMode::stochastic) std::fill(gate.phi.begin(), gate.phi.end(), 1);
    for (std::size_t k = 1; k <= iterations; ++k) {
        if (duty.mode == ActivationMode::stochastic && k > 1) gate = step_activation(gate, duty, rng);
        const int layer = static_cast<int>((k - 1) % static_cast<std::size_t>(layers.layer_count)) + 1;
        std::vector<std::uint8_t> phi(n, 0);
        for (NodeId i = 0; i < n; ++i) {
            const bool awake = duty.mode != ActivationMode::stochastic || gate.phi[i];
            phi[i] = layers.layer_of[i] == layer && awake ? 1 : 0;
        }
        seq.push_back(std::move(phi));
    }
    return seq;
}

} // namespace dcgossip
