#pragma once
// Per-device double deep Q-learning: epsilon-greedy action selection over
// {Local, Edge, Cloud}, uniform replay memory, double-DQN target computation
// and periodic hard target-network synchronization. Q-values estimate costs,
// so the greedy action is the argmin.

#include <cstdint>
#include <optional>
#include <vector>

#include "offsim/net.hpp"
#include "offsim/rng.hpp"
#include "offsim/types.hpp"

namespace offsim {

enum class TargetMode { DoubleDqn, Dqn };

struct Transition {
    std::array<double, kStateFeatures> state{};
    int action = 0;
    double cost = 0.0;
    std::array<double, kStateFeatures> next_state{};
    bool done = false;
};

struct AgentConfig {
    double gamma = 0.9;
    int batch_size = 30;
    int f_update = 20;  // target sync period, in learn-steps
    double epsilon_start = 1.0;
    double epsilon_decay = 0.95;  // applied once per federation round
    double epsilon_min = 0.05;
    std::size_t memory_capacity = 10000;
    double learning_rate = 1e-3;
    TargetMode target_mode = TargetMode::DoubleDqn;
};

void validate(const AgentConfig& cfg);  // throws std::invalid_argument

// Fixed-capacity ring with FIFO eviction and uniform sampling.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t inserted() const { return inserted_; }

    // i = 0 is the oldest transition still held.
    const Transition& oldest(std::size_t i) const;

    std::vector<Transition> sample(Rng& rng, std::size_t count) const;

private:
    std::size_t capacity_;
    std::vector<Transition> ring_;
    std::size_t next_ = 0;
    std::uint64_t inserted_ = 0;
};

// Training targets for a batch. DoubleDqn picks the bootstrap action with the
// online net and evaluates it with the target net; Dqn takes the target net's
// own minimum. Terminal transitions use the bare cost.
std::vector<double> compute_targets(const ParamVector& online, const ParamVector& target,
                                    const std::vector<Transition>& batch, TargetMode mode,
                                    double gamma);

// Lowest Q (expected cost) wins; ties break toward the lower index.
int argmin_action(const std::array<double, kNumActions>& q);

class Agent {
public:
    Agent(const LayerSpec& spec, const AgentConfig& cfg, std::uint64_t seed);

    // Epsilon-greedy over the online network.
    int select_action(const std::array<double, kStateFeatures>& state);
    int greedy_action(const std::array<double, kStateFeatures>& state) const;

    void store(const Transition& t);

    // One uniform batch, one Adam step on the online net; syncs the target net
    // every f_update learn-steps. Returns the batch loss, or nothing while the
    // memory is smaller than the batch size.
    std::optional<double> learn_step();

    void sync_target();                        // hard copy online -> target
    void decay_epsilon();                      // one multiplicative schedule step
    void set_global(const ParamVector& global);  // online = target = global

    const ParamVector& online() const { return online_; }
    const ParamVector& target_net() const { return target_; }
    const ReplayMemory& memory() const { return memory_; }
    double epsilon() const { return epsilon_; }
    long learn_steps() const { return learn_steps_; }
    const AgentConfig& config() const { return cfg_; }

private:
    AgentConfig cfg_;
    ParamVector online_;
    ParamVector target_;
    AdamState adam_;
    ReplayMemory memory_;
    Rng rng_;
    double epsilon_;
    long learn_steps_ = 0;
};

}  // namespace offsim
