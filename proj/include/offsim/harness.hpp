#pragma once
// Experiment execution: runs a config across its seeds and modes, produces
// metrics rows with smoothing, and drives the parameter sweeps behind the
// architecture / batch-size / target-update studies.

#include <string>
#include <vector>

#include "offsim/config.hpp"
#include "offsim/metrics.hpp"

namespace offsim {

// Metrics rows for every (mode, seed) combination the config asks for.
// sweep_var / sweep_value label the rows ("none" / "-" outside sweeps).
std::vector<MetricsRow> run_variant(const ExperimentConfig& cfg, const std::string& sweep_var,
                                    const std::string& sweep_value, const std::string& out_dir);

// Runs the config and writes <out_dir>/metrics.csv plus the effective-config
// echo. Returns the rows written.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Values a sweep accepts for one variable. Architecture values are hidden
// width lists like "30,64,16,32,32" (';'-separated on the command line); the
// CSV label form replaces commas with dashes.
struct SweepValue {
    std::string raw;    // value as given
    std::string label;  // CSV-safe form
};

std::vector<SweepValue> parse_sweep_values(const std::string& variable,
                                           const std::string& values_arg);

// Runs one experiment per sweep value with shared seeds and writes the
// combined <out_dir>/sweep_metrics.csv plus the base config echo.
std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg, const std::string& variable,
                                  const std::vector<SweepValue>& values,
                                  const std::string& out_dir);

}  // namespace offsim
