#include "offsim/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "offsim/subsolvers.hpp"

namespace offsim {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("config error: ") + field +
                                    " must be strictly positive");
    }
}

void require_bounds(double lo, double hi, const char* field) {
    if (!(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument(std::string("config error: ") + field +
                                    " bounds must satisfy 0 < lo <= hi");
    }
}

}  // namespace

void validate(const EnvConfig& cfg) {
    if (cfg.n_devices < 1) throw std::invalid_argument("config error: n_devices must be >= 1");
    if (cfg.queue_len0 < 0) throw std::invalid_argument("config error: queue_len must be >= 0");
    if (cfg.t_max < 1) throw std::invalid_argument("config error: t_max must be >= 1");
    require_bounds(cfg.task_bits_lo, cfg.task_bits_hi, "task_bits");
    require_bounds(cfg.cycles_per_bit_lo, cfg.cycles_per_bit_hi, "cycles_per_bit");
    require_bounds(cfg.deadline_lo_s, cfg.deadline_hi_s, "deadline_s");
    require_positive(cfg.channel_gain_1m, "channel_gain_1m");
    require_positive(cfg.pathloss_exponent, "pathloss_exponent");
    require_bounds(cfg.dist_lo_m, cfg.dist_hi_m, "dist_m");
    if (cfg.profile_jitter < 0.0 || cfg.profile_jitter >= 1.0) {
        throw std::invalid_argument("config error: profile_jitter must be in [0, 1)");
    }
    require_positive(cfg.f_max, "f_max");
    require_positive(cfg.e_max, "e_max");
    require_positive(cfg.p_max, "p_max");
    require_positive(cfg.kappa, "kappa");
    if (cfg.lambda_weight < 0.0) {
        throw std::invalid_argument("config error: lambda_weight must be >= 0");
    }
    require_positive(cfg.radio.bandwidth_hz, "bandwidth_hz");
    require_positive(cfg.radio.noise_w, "noise_w");
    require_positive(cfg.servers.f_edge, "f_edge");
    require_positive(cfg.servers.f_cloud, "f_cloud");
    if (cfg.servers.f_cloud < cfg.servers.f_edge) {
        throw std::invalid_argument("config error: f_cloud must be >= f_edge");
    }
    if (cfg.servers.psi_s < 0.0) throw std::invalid_argument("config error: psi_s must be >= 0");
}

std::vector<DeviceProfile> make_profiles(const EnvConfig& cfg, std::uint64_t master_seed) {
    validate(cfg);
    std::vector<DeviceProfile> profiles;
    profiles.reserve(cfg.n_devices);
    for (int i = 0; i < cfg.n_devices; ++i) {
        Rng rng(derive_seed(master_seed, StreamTag::Profile, static_cast<std::uint64_t>(i)));
        DeviceProfile p;
        p.distance_m = rng.uniform(cfg.dist_lo_m, cfg.dist_hi_m);
        const double j = cfg.profile_jitter;
        p.f_max = cfg.f_max * (1.0 + rng.uniform(-j, j));
        p.e_max = cfg.e_max * (1.0 + rng.uniform(-j, j));
        p.p_max = cfg.p_max;
        p.kappa = cfg.kappa;
        p.lambda_weight = cfg.lambda_weight;
        profiles.push_back(p);
    }
    return profiles;
}

double infeasible_penalty(const TaskSpec& task, const DeviceProfile& profile) {
    return 2.0 * (task.deadline_s + profile.lambda_weight * profile.e_max);
}

Environment::Environment(EnvConfig cfg, std::vector<DeviceProfile> profiles)
    : cfg_(std::move(cfg)), profiles_(std::move(profiles)) {
    validate(cfg_);
    if (static_cast<int>(profiles_.size()) != cfg_.n_devices) {
        throw std::invalid_argument("config error: profile count must equal n_devices");
    }
    devices_.resize(profiles_.size());
}

std::vector<Observation> Environment::reset(std::uint64_t master_seed) {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        Device& dev = devices_[i];
        dev.task_rng = Rng(derive_seed(master_seed, StreamTag::Task, i));
        dev.channel_rng = Rng(derive_seed(master_seed, StreamTag::Channel, i));
        dev.channel.rng_stream = i;
    }
    seeded_ = true;
    std::vector<Observation> obs;
    obs.reserve(devices_.size());
    for (int i = 0; i < n_devices(); ++i) {
        begin_episode(i);
        obs.push_back(observe(i));
    }
    return obs;
}

void Environment::begin_episode(int device) {
    require_ready();
    Device& dev = device_at(device);
    dev.queue.clear();
    for (int q = 0; q < cfg_.queue_len0; ++q) dev.queue.push_back(generate_task(device));
    dev.t = 0;
    update_channel(device);
    dev.done = dev.queue.empty();
}

ChannelState Environment::update_channel(int device) {
    require_ready();
    Device& dev = device_at(device);
    const double fading = dev.channel_rng.exponential();
    dev.channel.path_gain = cfg_.channel_gain_1m *
                            std::pow(profiles_[device].distance_m, -cfg_.pathloss_exponent) *
                            fading;
    return dev.channel;
}

TaskSpec Environment::generate_task(int device) {
    require_ready();
    Device& dev = device_at(device);
    TaskSpec task;
    task.size_bits = dev.task_rng.uniform(cfg_.task_bits_lo, cfg_.task_bits_hi);
    const double cpb = dev.task_rng.uniform(cfg_.cycles_per_bit_lo, cfg_.cycles_per_bit_hi);
    task.cpu_cycles = cpb * task.size_bits;
    task.deadline_s = dev.task_rng.uniform(cfg_.deadline_lo_s, cfg_.deadline_hi_s);
    return task;
}

Observation Environment::observe(int device) const {
    const Device& dev = device_at(device);
    const DeviceProfile& prof = profiles_[device];
    Observation obs;
    obs.queue_len = static_cast<int>(dev.queue.size());
    obs.path_gain = dev.channel.path_gain;
    obs.e_max = prof.e_max;
    obs.f_max = prof.f_max;
    if (!dev.queue.empty()) {
        obs.task_bits = dev.queue.front().size_bits;
        obs.task_cycles = dev.queue.front().cpu_cycles;
    }
    const double q_ref = cfg_.queue_len0 > 0 ? cfg_.queue_len0 : 1.0;
    const double h_ref = cfg_.channel_gain_1m * std::pow(cfg_.dist_lo_m, -cfg_.pathloss_exponent);
    const double c_ref = cfg_.cycles_per_bit_hi * cfg_.task_bits_hi;
    obs.normalized = {obs.queue_len / q_ref,
                      obs.path_gain / h_ref,
                      obs.task_bits / cfg_.task_bits_hi,
                      obs.task_cycles / c_ref,
                      obs.e_max / cfg_.e_max,
                      obs.f_max / cfg_.f_max};
    return obs;
}

Environment::StepResult Environment::step(int device, Action action) {
    require_ready();
    Device& dev = device_at(device);
    if (dev.done) throw std::logic_error("step called on a finished episode");

    const TaskSpec head = dev.queue.front();
    const DeviceProfile& prof = profiles_[device];
    const SolverResult solved =
        action == Action::Local
            ? solve_local_cpu(head, prof)
            : solve_transmit_power(head, action, dev.channel.path_gain, prof, cfg_.radio,
                                   cfg_.servers);

    StepOutcome outcome;
    if (solved.feasible) {
        outcome.cost = solved.delay_s + prof.lambda_weight * solved.energy_j;
        outcome.delay_s = solved.delay_s;
        outcome.energy_j = solved.energy_j;
        outcome.feasible = true;
        outcome.resource = solved.optimizer;
        dev.queue.pop_front();  // processed within its QoS budget
    } else {
        outcome.cost = infeasible_penalty(head, prof);  // task stays at the head
    }

    dev.t += 1;
    update_channel(device);
    dev.done = dev.queue.empty() || dev.t >= cfg_.t_max;
    return {outcome, observe(device), dev.done};
}

bool Environment::episode_done(int device) const { return device_at(device).done; }

int Environment::time_step(int device) const { return device_at(device).t; }

int Environment::queue_len(int device) const {
    return static_cast<int>(device_at(device).queue.size());
}

const TaskSpec& Environment::head_task(int device) const {
    const Device& dev = device_at(device);
    if (dev.queue.empty()) throw std::logic_error("head_task called on an empty queue");
    return dev.queue.front();
}

const DeviceProfile& Environment::profile(int device) const {
    device_at(device);
    return profiles_[device];
}

const Environment::Device& Environment::device_at(int id) const {
    if (id < 0 || id >= n_devices()) throw std::invalid_argument("device id out of range");
    return devices_[id];
}

Environment::Device& Environment::device_at(int id) {
    if (id < 0 || id >= n_devices()) throw std::invalid_argument("device id out of range");
    return devices_[id];
}

void Environment::require_ready() const {
    if (!seeded_) throw std::logic_error("environment used before reset");
}

}  // namespace offsim
