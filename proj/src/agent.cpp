#include "offsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace offsim {

void validate(const AgentConfig& cfg) {
    if (!(cfg.gamma >= 0.0) || cfg.gamma >= 1.0) {
        throw std::invalid_argument("config error: gamma must be in [0, 1)");
    }
    if (cfg.batch_size < 1) throw std::invalid_argument("config error: batch_size must be >= 1");
    if (cfg.f_update < 1) throw std::invalid_argument("config error: f_update must be >= 1");
    if (cfg.epsilon_start < 0.0 || cfg.epsilon_start > 1.0) {
        throw std::invalid_argument("config error: epsilon_start must be in [0, 1]");
    }
    if (cfg.epsilon_decay <= 0.0 || cfg.epsilon_decay > 1.0) {
        throw std::invalid_argument("config error: epsilon_decay must be in (0, 1]");
    }
    if (cfg.epsilon_min < 0.0 || cfg.epsilon_min > cfg.epsilon_start) {
        throw std::invalid_argument("config error: epsilon_min must be in [0, epsilon_start]");
    }
    if (cfg.memory_capacity < 1) {
        throw std::invalid_argument("config error: memory_capacity must be >= 1");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw std::invalid_argument("config error: learning_rate must be > 0");
    }
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("replay capacity must be >= 1");
    ring_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayMemory::push(const Transition& t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(t);
    } else {
        ring_[next_] = t;  // overwrite the oldest slot
        next_ = (next_ + 1) % capacity_;
    }
    ++inserted_;
}

const Transition& ReplayMemory::oldest(std::size_t i) const {
    if (i >= ring_.size()) throw std::out_of_range("replay index out of range");
    if (ring_.size() < capacity_) return ring_[i];
    return ring_[(next_ + i) % capacity_];
}

std::vector<Transition> ReplayMemory::sample(Rng& rng, std::size_t count) const {
    if (ring_.empty()) throw std::logic_error("sampling from an empty replay memory");
    std::vector<Transition> batch;
    batch.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        batch.push_back(ring_[rng.uniform_int(static_cast<int>(ring_.size()))]);
    }
    return batch;
}

int argmin_action(const std::array<double, kNumActions>& q) {
    int best = 0;
    for (int a = 1; a < kNumActions; ++a) {
        if (q[a] < q[best]) best = a;
    }
    return best;
}

std::vector<double> compute_targets(const ParamVector& online, const ParamVector& target,
                                    const std::vector<Transition>& batch, TargetMode mode,
                                    double gamma) {
    if (batch.empty()) throw std::invalid_argument("compute_targets: empty batch");
    if (mode != TargetMode::DoubleDqn && mode != TargetMode::Dqn) {
        throw std::invalid_argument("compute_targets: unknown target mode");
    }
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition& t : batch) {
        if (t.done) {
            targets.push_back(t.cost);
            continue;
        }
        const auto q_target = forward(target, t.next_state);
        double bootstrap;
        if (mode == TargetMode::DoubleDqn) {
            const auto q_online = forward(online, t.next_state);
            bootstrap = q_target[argmin_action(q_online)];
        } else {
            bootstrap = q_target[argmin_action(q_target)];
        }
        targets.push_back(t.cost + gamma * bootstrap);
    }
    return targets;
}

Agent::Agent(const LayerSpec& spec, const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      online_(init_network(spec, seed)),
      target_(online_),
      adam_(make_adam_state(spec, cfg.learning_rate)),
      memory_(cfg.memory_capacity),
      rng_(derive_seed(seed, StreamTag::Agent, 0)),
      epsilon_(cfg.epsilon_start) {
    validate(cfg_);
}

int Agent::select_action(const std::array<double, kStateFeatures>& state) {
    if (rng_.uniform01() < epsilon_) return rng_.uniform_int(kNumActions);
    return greedy_action(state);
}

int Agent::greedy_action(const std::array<double, kStateFeatures>& state) const {
    return argmin_action(forward(online_, state));
}

void Agent::store(const Transition& t) { memory_.push(t); }

std::optional<double> Agent::learn_step() {
    if (memory_.size() < static_cast<std::size_t>(cfg_.batch_size)) return std::nullopt;

    const std::vector<Transition> batch = memory_.sample(rng_, cfg_.batch_size);
    const std::vector<double> targets =
        compute_targets(online_, target_, batch, cfg_.target_mode, cfg_.gamma);

    TrainBatch tb;
    tb.states.reserve(batch.size());
    tb.actions.reserve(batch.size());
    for (const Transition& t : batch) {
        tb.states.push_back(t.state);
        tb.actions.push_back(t.action);
    }
    tb.targets = targets;

    const LossGrad lg = loss_and_gradients(online_, tb);
    auto [next, adam] = apply_update(online_, lg.grad, adam_);
    online_ = std::move(next);
    adam_ = std::move(adam);

    ++learn_steps_;
    if (learn_steps_ % cfg_.f_update == 0) sync_target();
    return lg.loss;
}

void Agent::sync_target() { target_ = online_; }

void Agent::decay_epsilon() {
    epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
}

void Agent::set_global(const ParamVector& global) {
    require_same_shape(online_.spec, global.spec);
    online_ = global;
    target_ = global;
}

}  // namespace offsim
