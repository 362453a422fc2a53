#include "offsim/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "offsim/federation.hpp"

namespace offsim {

namespace {

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failure on: " + path);
}

}  // namespace

std::vector<MetricsRow> run_variant(const ExperimentConfig& cfg, const std::string& sweep_var,
                                    const std::string& sweep_value, const std::string& out_dir) {
    std::vector<MetricsRow> rows;
    for (RunMode mode : modes_for(cfg)) {
        for (int s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(s);
            const TrainingSetup setup = to_training_setup(cfg, mode, seed);

            std::function<void(int, const ParamVector&)> on_round;
            if (cfg.write_checkpoints && !out_dir.empty()) {
                const auto dir = std::filesystem::path(out_dir) / "checkpoints";
                std::filesystem::create_directories(dir);
                const std::string stem = to_string(mode) + "_seed" + std::to_string(seed);
                on_round = [dir, stem](int round, const ParamVector& global) {
                    save_params(global,
                                (dir / (stem + "_round" + std::to_string(round + 1) + ".txt"))
                                    .string());
                };
            }

            const std::vector<RoundReport> reports = run_training(setup, on_round);
            std::vector<double> raw;
            raw.reserve(reports.size());
            for (const RoundReport& r : reports) raw.push_back(r.mean_cost);
            const std::vector<double> smoothed = smooth_trailing(raw, cfg.smoothing_window);

            for (std::size_t i = 0; i < reports.size(); ++i) {
                MetricsRow row;
                row.round = static_cast<int>(i) + 1;
                row.mode = to_string(mode);
                row.seed = seed;
                row.sweep_var = sweep_var;
                row.sweep_value = sweep_value;
                row.mean_cost = raw[i];
                row.smoothed_cost = smoothed[i];
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);
    const std::vector<MetricsRow> rows = run_variant(cfg, "none", "-", out_dir);
    write_metrics_csv(rows, (std::filesystem::path(out_dir) / "metrics.csv").string());
    write_text((std::filesystem::path(out_dir) / "effective_config.cfg").string(),
               effective_config_text(cfg));
    return rows;
}

std::vector<SweepValue> parse_sweep_values(const std::string& variable,
                                           const std::string& values_arg) {
    std::vector<SweepValue> values;
    if (variable == "batch_size" || variable == "f_update") {
        std::stringstream ss(values_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) throw std::invalid_argument("sweep error: empty value in list");
            values.push_back({item, item});
        }
    } else if (variable == "architecture") {
        std::stringstream ss(values_arg);
        std::string item;
        while (std::getline(ss, item, ';')) {
            if (item.empty()) throw std::invalid_argument("sweep error: empty value in list");
            std::string label = item;
            for (char& c : label) {
                if (c == ',') c = '-';
            }
            values.push_back({item, label});
        }
    } else {
        throw std::invalid_argument(
            "sweep error: variable must be batch_size, architecture or f_update (got '" +
            variable + "')");
    }
    if (values.empty()) throw std::invalid_argument("sweep error: no values given");
    return values;
}

std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg, const std::string& variable,
                                  const std::vector<SweepValue>& values,
                                  const std::string& out_dir) {
    if (values.empty()) throw std::invalid_argument("sweep error: no values given");
    validate(cfg);
    std::filesystem::create_directories(out_dir);

    std::vector<MetricsRow> rows;
    for (const SweepValue& value : values) {
        ExperimentConfig variant = cfg;
        if (variable == "batch_size") {
            apply_override(variant, "batch_size", value.raw);
        } else if (variable == "f_update") {
            apply_override(variant, "f_update", value.raw);
        } else if (variable == "architecture") {
            apply_override(variant, "hidden_layers", value.raw);
        } else {
            throw std::invalid_argument("sweep error: unknown variable '" + variable + "'");
        }
        validate(variant);
        const auto variant_rows = run_variant(variant, variable, value.label, out_dir);
        rows.insert(rows.end(), variant_rows.begin(), variant_rows.end());
    }

    write_metrics_csv(rows, (std::filesystem::path(out_dir) / "sweep_metrics.csv").string());
    write_text((std::filesystem::path(out_dir) / "effective_config.cfg").string(),
               effective_config_text(cfg));
    return rows;
}

}  // namespace offsim
