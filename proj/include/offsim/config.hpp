#pragma once
// Experiment configuration: a flat key = value text file with strict keys,
// full validation and an effective-config echo for reproducibility.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "offsim/agent.hpp"
#include "offsim/env.hpp"
#include "offsim/federation.hpp"

namespace offsim {

struct ExperimentConfig {
    EnvConfig env;      // physics, tasks, channel, device nominals
    AgentConfig agent;  // learning hyperparameters

    int n_selected = 20;
    int n_rounds = 200;
    std::string mode = "fed-ddqn";  // fed-ddqn | fed-dqn | dist-ddqn | all
    int seeds = 5;                  // consecutive master seeds per variant
    std::uint64_t master_seed = 1;
    std::vector<int> hidden_layers = {30, 64, 16, 32, 32};
    int smoothing_window = 10;
    bool write_checkpoints = false;

    std::set<std::string> overridden;  // keys explicitly set (file or CLI)
};

// Shortest round-trip decimal form of a double (deterministic output).
std::string format_double(double v);

// Every recognized config key, in echo order.
const std::vector<std::string>& config_keys();

// Sets one key; throws std::invalid_argument for unknown keys or bad values.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Parses flat key = value text ('#' starts a comment). Unknown keys and
// malformed lines are reported with their line number.
ExperimentConfig parse_config_text(const std::string& text);

// Loads and validates a config file; a missing file is its own error.
ExperimentConfig load_config(const std::string& path);

void validate(const ExperimentConfig& cfg);  // throws std::invalid_argument naming the field

// Echo of the effective configuration, marking which values came from the
// defaults. All physics defaults are artifact choices, not measured constants.
std::string effective_config_text(const ExperimentConfig& cfg);

// The run modes an experiment config expands to ("all" -> the three modes).
std::vector<RunMode> modes_for(const ExperimentConfig& cfg);

TrainingSetup to_training_setup(const ExperimentConfig& cfg, RunMode mode, std::uint64_t seed);

}  // namespace offsim
