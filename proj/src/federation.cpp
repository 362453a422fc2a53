#include "offsim/federation.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace offsim {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::FedDdqn: return "fed-ddqn";
        case RunMode::FedDqn: return "fed-dqn";
        case RunMode::DistDdqn: return "dist-ddqn";
    }
    throw std::invalid_argument("unknown run mode");
}

RunMode parse_run_mode(const std::string& name) {
    if (name == "fed-ddqn") return RunMode::FedDdqn;
    if (name == "fed-dqn") return RunMode::FedDqn;
    if (name == "dist-ddqn") return RunMode::DistDdqn;
    throw std::invalid_argument("config error: mode must be fed-ddqn, fed-dqn or dist-ddqn (got '" +
                                name + "')");
}

void validate(const FedConfig& cfg) {
    if (cfg.n_devices < 1) throw std::invalid_argument("config error: n_devices must be >= 1");
    if (cfg.n_selected < 1 || cfg.n_selected > cfg.n_devices) {
        throw std::invalid_argument("config error: n_selected must be in [1, n_devices]");
    }
    if (cfg.n_rounds < 1) throw std::invalid_argument("config error: n_rounds must be >= 1");
}

std::vector<int> select_devices(const std::vector<DeviceProfile>& profiles, int n_selected) {
    if (n_selected < 1 || n_selected > static_cast<int>(profiles.size())) {
        throw std::invalid_argument("n_selected must be in [1, device count]");
    }
    std::vector<double> m(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        m[i] = profiles[i].distance_m * profiles[i].p_max / profiles[i].f_max;
    }
    const double mean = std::accumulate(m.begin(), m.end(), 0.0) / m.size();

    std::vector<int> ids(profiles.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const double da = std::abs(m[a] - mean);
        const double db = std::abs(m[b] - mean);
        if (da != db) return da > db;
        return a < b;
    });
    ids.resize(n_selected);
    std::sort(ids.begin(), ids.end());
    return ids;
}

ParamVector aggregate_fedavg(const std::vector<ParamVector>& params) {
    if (params.empty()) throw std::invalid_argument("aggregate_fedavg: empty parameter list");
    const std::size_t len = params.front().values.size();
    for (const ParamVector& p : params) {
        if (!same_shape(p.spec, params.front().spec) || p.values.size() != len) {
            throw std::invalid_argument("aggregate_fedavg: parameter shapes differ");
        }
    }

    ParamVector out{params.front().spec, std::vector<double>(len, 0.0)};
    const std::size_t k = params.size();
    std::vector<double> column(k);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t i = 0; i < k; ++i) column[i] = params[i].values[j];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) sum += v;
        out.values[j] = std::clamp(sum / k, column.front(), column.back());
    }
    return out;
}

std::uint64_t params_id(const ParamVector& params) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (double v : params.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (bits >> (8 * byte)) & 0xFFull;
            hash *= 0x100000001B3ull;
        }
    }
    return hash;
}

void broadcast_global(std::vector<Agent>& agents, const ParamVector& global) {
    for (Agent& agent : agents) agent.set_global(global);
}

namespace {

// One episode on one device: act, store, learn until the queue drains or the
// step cap hits. Returns the mean step cost.
double run_episode(Environment& env, Agent& agent, int device) {
    env.begin_episode(device);
    Observation obs = env.observe(device);
    double cost_sum = 0.0;
    int steps = 0;
    while (!env.episode_done(device)) {
        const int action = agent.select_action(obs.normalized);
        const Environment::StepResult sr = env.step(device, static_cast<Action>(action));
        agent.store({obs.normalized, action, sr.outcome.cost, sr.next.normalized, sr.done});
        agent.learn_step();
        cost_sum += sr.outcome.cost;
        ++steps;
        obs = sr.next;
    }
    return steps > 0 ? cost_sum / steps : 0.0;
}

}  // namespace

std::pair<ParamVector, RoundReport> run_round(const ParamVector& global, Environment& env,
                                              std::vector<Agent>& agents, const FedConfig& fed,
                                              RunMode mode, int round_index) {
    if (static_cast<int>(agents.size()) != env.n_devices()) {
        throw std::invalid_argument("agent count must equal device count");
    }
    const auto start = std::chrono::steady_clock::now();
    const bool federated = mode != RunMode::DistDdqn;

    if (federated) broadcast_global(agents, global);

    std::vector<int> participants;
    if (federated) {
        participants = select_devices(env.profiles(), fed.n_selected);
    } else {
        participants.resize(env.n_devices());
        std::iota(participants.begin(), participants.end(), 0);
    }

    RoundReport report;
    report.round = round_index;
    report.selected = participants;
    report.device_mean_cost.reserve(participants.size());
    for (int device : participants) {
        report.device_mean_cost.push_back(run_episode(env, agents[device], device));
    }
    report.mean_cost =
        std::accumulate(report.device_mean_cost.begin(), report.device_mean_cost.end(), 0.0) /
        report.device_mean_cost.size();

    ParamVector next_global = global;
    if (federated) {
        std::vector<ParamVector> uploads;
        uploads.reserve(participants.size());
        for (int device : participants) uploads.push_back(agents[device].online());
        next_global = aggregate_fedavg(uploads);
    }
    report.global_params_id = params_id(next_global);

    for (Agent& agent : agents) agent.decay_epsilon();  // shared round-level schedule

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(next_global), std::move(report)};
}

std::vector<RoundReport> run_training(const TrainingSetup& setup,
                                      const std::function<void(int, const ParamVector&)>& on_round) {
    validate(setup.env);
    validate(setup.agent);
    validate(setup.fed);
    validate(setup.net);
    if (setup.env.n_devices != setup.fed.n_devices) {
        throw std::invalid_argument("config error: env and federation device counts differ");
    }

    Environment env(setup.env, make_profiles(setup.env, setup.master_seed));
    env.reset(setup.master_seed);

    AgentConfig agent_cfg = setup.agent;
    agent_cfg.target_mode =
        setup.mode == RunMode::FedDqn ? TargetMode::Dqn : TargetMode::DoubleDqn;

    ParamVector global =
        init_network(setup.net, derive_seed(setup.master_seed, StreamTag::GlobalInit, 0));

    std::vector<Agent> agents;
    agents.reserve(setup.env.n_devices);
    for (int i = 0; i < setup.env.n_devices; ++i) {
        agents.emplace_back(setup.net, agent_cfg,
                            derive_seed(setup.master_seed, StreamTag::Agent, i));
        agents.back().set_global(global);  // every device starts from the global init
    }

    std::vector<RoundReport> reports;
    reports.reserve(setup.fed.n_rounds);
    for (int r = 0; r < setup.fed.n_rounds; ++r) {
        auto [next_global, report] = run_round(global, env, agents, setup.fed, setup.mode, r);
        global = std::move(next_global);
        if (on_round) on_round(r, global);
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace offsim
