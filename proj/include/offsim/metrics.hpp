#pragma once
// Metrics rows, CSV serialization and per-figure plot-data extraction.

#include <cstdint>
#include <string>
#include <vector>

namespace offsim {

// One training round of one run variant.
struct MetricsRow {
    int round = 0;             // 1-based
    std::string mode;          // fed-ddqn | fed-dqn | dist-ddqn
    std::uint64_t seed = 0;
    std::string sweep_var;     // none | batch_size | architecture | f_update
    std::string sweep_value;   // "-" when sweep_var is none
    double mean_cost = 0.0;    // mean episode cost over participating devices
    double smoothed_cost = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "round,mode,seed,sweep_var,sweep_value,mean_cost,smoothed_cost";

// Trailing moving average with the window clipped at the series start.
std::vector<double> smooth_trailing(const std::vector<double>& raw, int window);

std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// Parses a metrics CSV; malformed content is reported with its line number.
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

// One tidy file per figure analogue: cost vs round, one series per variant
// (modes when no sweep variable, sweep values otherwise). Multi-seed series
// report the per-round lower median over seeds, so every emitted value is one
// of the smoothed inputs. Returns the paths written.
std::vector<std::string> emit_plot_data(const std::string& metrics_path,
                                        const std::string& out_dir);

}  // namespace offsim
