// Command-line front end: run one experiment, sweep a training parameter, or
// extract per-figure plot data from a metrics file.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "offsim/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"offsim - federated DDQN computation-offloading simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::string variable;
    std::string values;
    std::string metrics_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Config file (flat key = value lines)");
        cmd->add_option("--seed", seed, "Master seed override")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--mode", mode, "fed-ddqn | fed-dqn | dist-ddqn | all");
        cmd->add_option("--out", out_dir, "Output directory (default: out)");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run the configured experiment over its seeds");
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run the experiment once per sweep value");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--variable", variable, "batch_size | architecture | f_update")
        ->required();
    sweep_cmd
        ->add_option("--values", values,
                     "Comma-separated values; architecture variants separated by ';'")
        ->required();

    CLI::App* plot_cmd =
        app.add_subcommand("plot-data", "Write per-figure series from a metrics CSV");
    plot_cmd->add_option("--metrics", metrics_path, "Metrics CSV produced by run/sweep")
        ->required();
    plot_cmd->add_option("--out", out_dir, "Output directory (default: out)");

    try {
        app.parse(argc, argv);

        auto make_config = [&]() {
            offsim::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = offsim::load_config(config_path);
            if (have_seed) offsim::apply_override(cfg, "master_seed", std::to_string(seed));
            if (!mode.empty()) offsim::apply_override(cfg, "mode", mode);
            offsim::validate(cfg);
            return cfg;
        };

        if (run_cmd->parsed()) {
            const auto rows = offsim::run_experiment(make_config(), out_dir);
            std::cout << "wrote " << rows.size() << " metric rows to " << out_dir
                      << "/metrics.csv\n";
        } else if (sweep_cmd->parsed()) {
            const auto sweep_values = offsim::parse_sweep_values(variable, values);
            const auto rows = offsim::run_sweep(make_config(), variable, sweep_values, out_dir);
            std::cout << "wrote " << rows.size() << " metric rows to " << out_dir
                      << "/sweep_metrics.csv\n";
        } else if (plot_cmd->parsed()) {
            const auto written = offsim::emit_plot_data(metrics_path, out_dir);
            for (const auto& path : written) std::cout << "wrote " << path << "\n";
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
