#pragma once
// Round orchestration: broadcast the global model, pick the participating
// devices, run one episode per participant with local training, collect the
// online networks and average them into the next global model.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "offsim/agent.hpp"
#include "offsim/env.hpp"
#include "offsim/net.hpp"

namespace offsim {

enum class RunMode { FedDdqn, FedDqn, DistDdqn };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& name);  // throws std::invalid_argument

struct FedConfig {
    int n_devices = 100;
    int n_selected = 20;
    int n_rounds = 200;
};

void validate(const FedConfig& cfg);  // throws std::invalid_argument

// Device selection: rank by the deviation of m_i = d_i * p_max_i / f_max_i
// from the population mean (descending, ties toward the lower id) and keep
// the top n_selected. Picking the extreme deviations maximizes the spread of
// experiences contributed to the aggregate.
std::vector<int> select_devices(const std::vector<DeviceProfile>& profiles, int n_selected);

// Unweighted elementwise mean. Summands are sorted per coordinate before
// adding, which makes the result invariant under input permutation, and the
// mean is clamped to the coordinate's [min, max] so rounding cannot push it
// outside the hull of the inputs.
ParamVector aggregate_fedavg(const std::vector<ParamVector>& params);

// FNV-1a over the parameter bytes; identifies a model in round reports.
std::uint64_t params_id(const ParamVector& params);

struct RoundReport {
    int round = 0;
    std::vector<int> selected;            // participating device ids
    std::vector<double> device_mean_cost; // mean step cost per participant
    double mean_cost = 0.0;               // mean over participants
    std::uint64_t global_params_id = 0;
    double wall_time_s = 0.0;
};

// Copies the global model into every agent's online and target networks.
void broadcast_global(std::vector<Agent>& agents, const ParamVector& global);

// One federation round. In the federated modes the round broadcasts, selects,
// trains and aggregates; in distributed mode every device trains its own
// model and the global model passes through untouched.
std::pair<ParamVector, RoundReport> run_round(const ParamVector& global, Environment& env,
                                              std::vector<Agent>& agents, const FedConfig& fed,
                                              RunMode mode, int round_index);

struct TrainingSetup {
    EnvConfig env;
    AgentConfig agent;
    FedConfig fed;
    LayerSpec net;
    RunMode mode = RunMode::FedDdqn;
    std::uint64_t master_seed = 1;
};

// Runs fed.n_rounds rounds from a fresh seeded world. The optional callback
// sees each round's global model (used for per-round checkpoints).
std::vector<RoundReport> run_training(
    const TrainingSetup& setup,
    const std::function<void(int, const ParamVector&)>& on_round = nullptr);

}  // namespace offsim
