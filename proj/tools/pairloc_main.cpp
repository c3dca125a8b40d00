// pairloc CLI: runs the configured experiments and emits CSV results.
//
//   pairloc <experiment> --config <path> [--seed S] [--out PATH] [--threads K]
//   pairloc plotdata --in <csv> [--out PATH]
//
// Exit codes: 0 success, 2 configuration error, 3 estimator failure rate
// above 50%.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pairloc/experiments.hpp"
#include "pairloc/version.hpp"

namespace {

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("PAIRLOC_THREADS")) {
        try {
            const int parsed = std::stoi(env);
            if (parsed > 0) return parsed;
        } catch (const std::exception&) {
            // fall through to auto
        }
    }
    return 0;  // auto: hardware concurrency
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairloc: localization from one-bit paired comparisons"};
    app.set_version_flag("--version", pairloc::kVersion);
    app.require_subcommand(1);

    const char* experiment_names[] = {"sigma_sweep",     "noise_gaussian", "noise_random",
                                      "noise_adversarial", "adaptive_stages", "adaptive_catalog",
                                      "validate",        "bounds"};

    std::string config_path;
    std::string out_override;
    long long seed_override = -1;
    int threads = 0;

    std::vector<CLI::App*> experiment_cmds;
    for (const char* name : experiment_names) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        cmd->add_option("--config", config_path, "configuration file")->required();
        cmd->add_option("--seed", seed_override, "override the config seed");
        cmd->add_option("--out", out_override, "override the output path");
        cmd->add_option("--threads", threads, "worker threads (default: PAIRLOC_THREADS or all cores)");
        experiment_cmds.push_back(cmd);
    }

    std::string plot_in, plot_out;
    CLI::App* plot_cmd = app.add_subcommand("plotdata", "pivot an aggregates CSV into tidy plot columns");
    plot_cmd->add_option("--in", plot_in, "aggregates CSV produced by an experiment")->required();
    plot_cmd->add_option("--out", plot_out, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot_cmd->parsed()) {
            std::ifstream in(plot_in);
            if (!in) {
                std::cerr << "pairloc: cannot open " << plot_in << "\n";
                return 2;
            }
            if (plot_out.empty()) {
                pairloc::emit_plot_data(in, std::cout);
            } else {
                std::ofstream out(plot_out);
                if (!out) {
                    std::cerr << "pairloc: cannot open " << plot_out << "\n";
                    return 2;
                }
                pairloc::emit_plot_data(in, out);
            }
            return 0;
        }

        for (std::size_t i = 0; i < experiment_cmds.size(); ++i) {
            if (!experiment_cmds[i]->parsed()) continue;
            const pairloc::ExperimentKind kind =
                pairloc::experiment_from_name(experiment_names[i]);
            const pairloc::KeyValueConfig kv = pairloc::KeyValueConfig::parse_file(config_path);
            pairloc::ExperimentConfig config = pairloc::ExperimentConfig::from_config(kind, kv);
            if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
            if (!out_override.empty()) config.out_path = out_override;

            const pairloc::ExperimentOutcome outcome =
                pairloc::run_experiment(config, resolve_threads(threads));
            std::cerr << "pairloc: " << experiment_names[i] << " finished (" << outcome.runs
                      << " runs, " << outcome.failures << " failures) -> " << config.out_path
                      << "\n";
            return outcome.exit_code;
        }
    } catch (const pairloc::ConfigError& err) {
        std::cerr << "pairloc: config error: " << err.what() << "\n";
        return 2;
    } catch (const pairloc::InvalidParameter& err) {
        std::cerr << "pairloc: config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "pairloc: error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
