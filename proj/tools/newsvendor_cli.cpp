// Experiment runner for the censored-demand newsvendor arena.
//
//   newsvendor run [config] [--preset NAME] [--out DIR] [--seed U64]
//                  [--runs R] [--horizon T]
//   newsvendor validate [config] [--preset NAME] [...]
//
// A preset provides a built-in configuration; a config file, when also
// given, is parsed instead and the preset only names the run. Exit codes:
// 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "newsvendor/config.hpp"
#include "newsvendor/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<long> horizon;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("config", args.config_path, "configuration file (INI-style)");
    cmd->add_option("--preset", args.preset,
                    "built-in configuration: fig1, fig2, aim-demo, combinatorial-demo");
    cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
    cmd->add_option("--seed", args.seed, "base seed (overrides the config)");
    cmd->add_option("--runs", args.runs, "number of Monte Carlo runs (override)");
    cmd->add_option("--horizon", args.horizon, "number of periods (override)");
}

newsvendor::ExperimentConfig load_config(const CommonArgs& args)
{
    using namespace newsvendor;
    std::string text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in)
            throw ConfigError("cannot open config file: " + args.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    } else if (!args.preset.empty()) {
        text = preset_text(args.preset);
    } else {
        throw ConfigError("need a config file or --preset");
    }
    ExperimentConfig cfg = parse_config_text(text);
    cfg.preset_name = args.preset;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed) cfg.seed = *args.seed;
    if (args.runs) cfg.runs = *args.runs;
    if (args.horizon) cfg.horizon = *args.horizon;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"regret-minimizing inventory policies for the repeated newsvendor "
                 "problem with censored demand"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment and write CSV/SVG outputs");
    add_common(run_cmd, run_args);

    CommonArgs validate_args;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check a configuration and print resolved parameters");
    add_common(validate_cmd, validate_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto cfg = load_config(run_args);
            newsvendor::run_experiment(cfg);
            std::cout << "wrote runs.csv, trace.csv, plot.svg, manifest under " << cfg.out_dir
                      << "\n";
        } else {
            const auto cfg = load_config(validate_args);
            std::cout << newsvendor::validation_report(cfg);
        }
    } catch (const newsvendor::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
