#include "offsim/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace offsim {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config error: " + key + ": expected a number, got '" + value +
                                    "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config error: " + key + ": expected an integer, got '" +
                                    value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config error: " + key +
                                    ": expected an unsigned integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config error: " + key + ": expected true/false, got '" + value +
                                "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw std::invalid_argument("config error: " + key + ": empty list entry");
        }
        out.push_back(static_cast<int>(parse_int(key, item)));
    }
    if (out.empty()) throw std::invalid_argument("config error: " + key + ": empty list");
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

struct KeyHandler {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, KeyHandler>& handlers() {
    static const std::map<std::string, KeyHandler> table = [] {
        std::map<std::string, KeyHandler> t;
        auto add_double = [&t](const std::string& key, double EnvConfig::* field) {
            t[key] = {[key, field](ExperimentConfig& c, const std::string& v) {
                          c.env.*field = parse_double(key, v);
                      },
                      [field](const ExperimentConfig& c) { return format_double(c.env.*field); }};
        };
        t["n_devices"] = {[](ExperimentConfig& c, const std::string& v) {
                              c.env.n_devices = static_cast<int>(parse_int("n_devices", v));
                          },
                          [](const ExperimentConfig& c) { return std::to_string(c.env.n_devices); }};
        t["n_selected"] = {[](ExperimentConfig& c, const std::string& v) {
                               c.n_selected = static_cast<int>(parse_int("n_selected", v));
                           },
                           [](const ExperimentConfig& c) { return std::to_string(c.n_selected); }};
        t["n_rounds"] = {[](ExperimentConfig& c, const std::string& v) {
                             c.n_rounds = static_cast<int>(parse_int("n_rounds", v));
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.n_rounds); }};
        t["mode"] = {[](ExperimentConfig& c, const std::string& v) {
                         if (v != "all") parse_run_mode(v);  // throws on anything unknown
                         c.mode = v;
                     },
                     [](const ExperimentConfig& c) { return c.mode; }};
        t["seeds"] = {[](ExperimentConfig& c, const std::string& v) {
                          c.seeds = static_cast<int>(parse_int("seeds", v));
                      },
                      [](const ExperimentConfig& c) { return std::to_string(c.seeds); }};
        t["master_seed"] = {[](ExperimentConfig& c, const std::string& v) {
                                c.master_seed = parse_u64("master_seed", v);
                            },
                            [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }};
        t["queue_len"] = {[](ExperimentConfig& c, const std::string& v) {
                              c.env.queue_len0 = static_cast<int>(parse_int("queue_len", v));
                          },
                          [](const ExperimentConfig& c) { return std::to_string(c.env.queue_len0); }};
        t["t_max"] = {[](ExperimentConfig& c, const std::string& v) {
                          c.env.t_max = static_cast<int>(parse_int("t_max", v));
                      },
                      [](const ExperimentConfig& c) { return std::to_string(c.env.t_max); }};
        add_double("task_bits_lo", &EnvConfig::task_bits_lo);
        add_double("task_bits_hi", &EnvConfig::task_bits_hi);
        add_double("cycles_per_bit_lo", &EnvConfig::cycles_per_bit_lo);
        add_double("cycles_per_bit_hi", &EnvConfig::cycles_per_bit_hi);
        add_double("deadline_lo_s", &EnvConfig::deadline_lo_s);
        add_double("deadline_hi_s", &EnvConfig::deadline_hi_s);
        add_double("channel_gain_1m", &EnvConfig::channel_gain_1m);
        add_double("pathloss_exponent", &EnvConfig::pathloss_exponent);
        add_double("dist_lo_m", &EnvConfig::dist_lo_m);
        add_double("dist_hi_m", &EnvConfig::dist_hi_m);
        add_double("profile_jitter", &EnvConfig::profile_jitter);
        add_double("f_max", &EnvConfig::f_max);
        add_double("e_max", &EnvConfig::e_max);
        add_double("p_max", &EnvConfig::p_max);
        add_double("kappa", &EnvConfig::kappa);
        add_double("lambda_weight", &EnvConfig::lambda_weight);
        t["bandwidth_hz"] = {[](ExperimentConfig& c, const std::string& v) {
                                 c.env.radio.bandwidth_hz = parse_double("bandwidth_hz", v);
                             },
                             [](const ExperimentConfig& c) {
                                 return format_double(c.env.radio.bandwidth_hz);
                             }};
        t["noise_w"] = {[](ExperimentConfig& c, const std::string& v) {
                            c.env.radio.noise_w = parse_double("noise_w", v);
                        },
                        [](const ExperimentConfig& c) { return format_double(c.env.radio.noise_w); }};
        t["f_edge"] = {[](ExperimentConfig& c, const std::string& v) {
                           c.env.servers.f_edge = parse_double("f_edge", v);
                       },
                       [](const ExperimentConfig& c) { return format_double(c.env.servers.f_edge); }};
        t["f_cloud"] = {[](ExperimentConfig& c, const std::string& v) {
                            c.env.servers.f_cloud = parse_double("f_cloud", v);
                        },
                        [](const ExperimentConfig& c) { return format_double(c.env.servers.f_cloud); }};
        t["psi_s"] = {[](ExperimentConfig& c, const std::string& v) {
                          c.env.servers.psi_s = parse_double("psi_s", v);
                      },
                      [](const ExperimentConfig& c) { return format_double(c.env.servers.psi_s); }};
        t["gamma"] = {[](ExperimentConfig& c, const std::string& v) {
                          c.agent.gamma = parse_double("gamma", v);
                      },
                      [](const ExperimentConfig& c) { return format_double(c.agent.gamma); }};
        t["batch_size"] = {[](ExperimentConfig& c, const std::string& v) {
                               c.agent.batch_size = static_cast<int>(parse_int("batch_size", v));
                           },
                           [](const ExperimentConfig& c) {
                               return std::to_string(c.agent.batch_size);
                           }};
        t["f_update"] = {[](ExperimentConfig& c, const std::string& v) {
                             c.agent.f_update = static_cast<int>(parse_int("f_update", v));
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.agent.f_update); }};
        t["epsilon_start"] = {[](ExperimentConfig& c, const std::string& v) {
                                  c.agent.epsilon_start = parse_double("epsilon_start", v);
                              },
                              [](const ExperimentConfig& c) {
                                  return format_double(c.agent.epsilon_start);
                              }};
        t["epsilon_decay"] = {[](ExperimentConfig& c, const std::string& v) {
                                  c.agent.epsilon_decay = parse_double("epsilon_decay", v);
                              },
                              [](const ExperimentConfig& c) {
                                  return format_double(c.agent.epsilon_decay);
                              }};
        t["epsilon_min"] = {[](ExperimentConfig& c, const std::string& v) {
                                c.agent.epsilon_min = parse_double("epsilon_min", v);
                            },
                            [](const ExperimentConfig& c) {
                                return format_double(c.agent.epsilon_min);
                            }};
        t["memory_capacity"] = {[](ExperimentConfig& c, const std::string& v) {
                                    c.agent.memory_capacity =
                                        static_cast<std::size_t>(parse_u64("memory_capacity", v));
                                },
                                [](const ExperimentConfig& c) {
                                    return std::to_string(c.agent.memory_capacity);
                                }};
        t["learning_rate"] = {[](ExperimentConfig& c, const std::string& v) {
                                  c.agent.learning_rate = parse_double("learning_rate", v);
                              },
                              [](const ExperimentConfig& c) {
                                  return format_double(c.agent.learning_rate);
                              }};
        t["hidden_layers"] = {[](ExperimentConfig& c, const std::string& v) {
                                  c.hidden_layers = parse_int_list("hidden_layers", v);
                              },
                              [](const ExperimentConfig& c) { return join_ints(c.hidden_layers); }};
        t["smoothing_window"] = {[](ExperimentConfig& c, const std::string& v) {
                                     c.smoothing_window =
                                         static_cast<int>(parse_int("smoothing_window", v));
                                 },
                                 [](const ExperimentConfig& c) {
                                     return std::to_string(c.smoothing_window);
                                 }};
        t["write_checkpoints"] = {[](ExperimentConfig& c, const std::string& v) {
                                      c.write_checkpoints = parse_bool("write_checkpoints", v);
                                  },
                                  [](const ExperimentConfig& c) {
                                      return c.write_checkpoints ? std::string("true")
                                                                 : std::string("false");
                                  }};
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [key, handler] : handlers()) k.push_back(key);
        return k;
    }();
    return keys;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = handlers();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw std::invalid_argument("config error: unknown key '" + key + "'");
    }
    it->second.set(cfg, value);
    cfg.overridden.insert(key);
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config parse error at line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config parse error at line " + std::to_string(line_no) +
                                        ": empty key");
        }
        try {
            apply_override(cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(e.what()) + " (line " +
                                        std::to_string(line_no) + ")");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config file not found: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig cfg = parse_config_text(buffer.str());
    validate(cfg);
    return cfg;
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.env);
    validate(cfg.agent);
    FedConfig fed{cfg.env.n_devices, cfg.n_selected, cfg.n_rounds};
    validate(fed);
    if (cfg.mode != "all") parse_run_mode(cfg.mode);
    if (cfg.seeds < 1) throw std::invalid_argument("config error: seeds must be >= 1");
    if (cfg.smoothing_window < 1) {
        throw std::invalid_argument("config error: smoothing_window must be >= 1");
    }
    make_layer_spec(cfg.hidden_layers);  // throws on bad widths
}

std::string effective_config_text(const ExperimentConfig& cfg) {
    std::string out;
    out += "# Effective configuration (flat key = value).\n";
    out += "# Lines marked (default) use artifact defaults, not values from the input;\n";
    out += "# the physics defaults are simulation choices, not measured constants.\n";
    const auto& table = handlers();
    for (const std::string& key : config_keys()) {
        out += key + " = " + table.at(key).get(cfg);
        out += cfg.overridden.count(key) ? "\n" : "  # (default)\n";
    }
    return out;
}

std::vector<RunMode> modes_for(const ExperimentConfig& cfg) {
    if (cfg.mode == "all") return {RunMode::FedDdqn, RunMode::FedDqn, RunMode::DistDdqn};
    return {parse_run_mode(cfg.mode)};
}

TrainingSetup to_training_setup(const ExperimentConfig& cfg, RunMode mode, std::uint64_t seed) {
    TrainingSetup setup;
    setup.env = cfg.env;
    setup.agent = cfg.agent;
    setup.fed = FedConfig{cfg.env.n_devices, cfg.n_selected, cfg.n_rounds};
    setup.net = make_layer_spec(cfg.hidden_layers);
    setup.mode = mode;
    setup.master_seed = seed;
    return setup;
}

}  // namespace offsim
