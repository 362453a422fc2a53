#pragma once
// Domain types shared by the environment, the per-step subproblem solvers and
// the training stack.

#include <array>
#include <cstdint>

namespace offsim {

// One computation task: payload size, CPU demand and completion deadline.
struct TaskSpec {
    double size_bits = 0.0;
    double cpu_cycles = 0.0;
    double deadline_s = 0.0;
};

// Static per-device limits and coefficients.
struct DeviceProfile {
    double f_max = 0.0;          // local CPU cap, cycles/s
    double e_max = 0.0;          // per-step energy cap, J
    double p_max = 0.0;          // transmit power cap, W
    double kappa = 0.0;          // chip coefficient, J*s^2/cycles^2
    double lambda_weight = 0.0;  // joules-to-seconds tradeoff weight
    double distance_m = 0.0;     // distance to the base station, m
};

// Per-step wireless channel state.
struct ChannelState {
    double path_gain = 0.0;        // linear power gain
    std::uint64_t rng_stream = 0;  // stream id the draw came from
};

enum class Action : int { Local = 0, Edge = 1, Cloud = 2 };
inline constexpr int kNumActions = 3;

// Agent-visible state: raw features plus the normalized vector fed to the net.
struct Observation {
    int queue_len = 0;
    double path_gain = 0.0;
    double task_bits = 0.0;
    double task_cycles = 0.0;
    double e_max = 0.0;
    double f_max = 0.0;
    std::array<double, 6> normalized{};

    bool terminal() const { return queue_len == 0; }
};

// Outcome of one environment step.
struct StepOutcome {
    double cost = 0.0;
    double delay_s = 0.0;
    double energy_j = 0.0;
    bool feasible = false;
    double resource = 0.0;  // f* (cycles/s) when Local, p* (W) otherwise
};

struct RadioParams {
    double bandwidth_hz = 0.0;  // B
    double noise_w = 0.0;       // receiver noise power, sigma^2
};

struct ServerParams {
    double f_edge = 0.0;   // edge computation capacity, cycles/s
    double f_cloud = 0.0;  // cloud computation capacity, cycles/s
    double psi_s = 0.0;    // cloud access delay, s
};

// Outcome of one per-step scalar subproblem.
struct SolverResult {
    bool feasible = false;
    double optimizer = 0.0;  // cycles/s (local) or watts (offload)
    double cost = 0.0;
    double delay_s = 0.0;
    double energy_j = 0.0;
};

}  // namespace offsim
