#pragma once
// Per-device task queues, time-varying wireless channels, and the step
// dynamics that turn an offloading action into a cost and a successor state.
// Each device is an independent state machine with its own seeded streams, so
// stepping devices in parallel or serially gives identical traces.

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "offsim/rng.hpp"
#include "offsim/types.hpp"

namespace offsim {

struct EnvConfig {
    int n_devices = 100;
    int queue_len0 = 5;   // tasks per episode
    int t_max = 200;      // step cap per episode

    // Task distribution.
    double task_bits_lo = 1e5;
    double task_bits_hi = 1e6;
    double cycles_per_bit_lo = 200.0;
    double cycles_per_bit_hi = 3000.0;
    double deadline_lo_s = 0.5;
    double deadline_hi_s = 2.0;

    // Channel: path_gain = channel_gain_1m * d^-pathloss_exponent * Exp(1).
    double channel_gain_1m = 1e-3;
    double pathloss_exponent = 3.0;

    // Device heterogeneity: distance uniform in [dist_lo_m, dist_hi_m];
    // f_max and e_max jittered by +-profile_jitter around the nominal values.
    double dist_lo_m = 10.0;
    double dist_hi_m = 200.0;
    double profile_jitter = 0.3;

    // Nominal device limits (1 GHz cap, 23 dBm transmit cap, e_max = p_max * 1 s).
    double f_max = 1e9;
    double e_max = 0.19952623149688797;
    double p_max = 0.19952623149688797;
    double kappa = 1e-27;
    double lambda_weight = 1.0;

    RadioParams radio{1e6, 1e-13};
    ServerParams servers{1e10, 1e11, 0.2};
};

void validate(const EnvConfig& cfg);  // throws std::invalid_argument naming the field

// Heterogeneous device profiles, deterministic per (config, seed).
std::vector<DeviceProfile> make_profiles(const EnvConfig& cfg, std::uint64_t master_seed);

// Cost charged when a step's subproblem is infeasible. Strictly exceeds any
// feasible cost of the same task (feasible cost <= deadline + lambda*e_max).
double infeasible_penalty(const TaskSpec& task, const DeviceProfile& profile);

class Environment {
public:
    Environment(EnvConfig cfg, std::vector<DeviceProfile> profiles);

    // Seeds all per-device streams and starts a fresh episode on every device.
    std::vector<Observation> reset(std::uint64_t master_seed);

    // Refills the device's queue with queue_len0 fresh tasks and restarts its
    // episode clock. Draws come from the device's persistent streams, so
    // successive episodes differ while the full run stays deterministic.
    void begin_episode(int device);

    // Draws a new channel state for the device.
    ChannelState update_channel(int device);

    TaskSpec generate_task(int device);

    Observation observe(int device) const;

    struct StepResult {
        StepOutcome outcome;
        Observation next;
        bool done = false;
    };
    // Prices the head task under the action; feasible steps consume the task,
    // infeasible ones keep it at the head and charge the penalty.
    StepResult step(int device, Action action);

    bool episode_done(int device) const;
    int time_step(int device) const;
    int queue_len(int device) const;
    const TaskSpec& head_task(int device) const;

    int n_devices() const { return static_cast<int>(devices_.size()); }
    const EnvConfig& config() const { return cfg_; }
    const DeviceProfile& profile(int device) const;
    const std::vector<DeviceProfile>& profiles() const { return profiles_; }

private:
    struct Device {
        std::deque<TaskSpec> queue;
        ChannelState channel;
        Rng task_rng{0};
        Rng channel_rng{0};
        int t = 0;
        bool done = true;
    };

    const Device& device_at(int id) const;
    Device& device_at(int id);
    void require_ready() const;

    EnvConfig cfg_;
    std::vector<DeviceProfile> profiles_;
    std::vector<Device> devices_;
    bool seeded_ = false;
};

}  // namespace offsim
