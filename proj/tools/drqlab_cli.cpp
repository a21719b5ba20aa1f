#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "drqlab/config.hpp"
#include "drqlab/harness.hpp"
#include "drqlab/kernels.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory (overrides out_dir)");
    cmd->add_option("--seed", opts.seed, "run a single seed instead of the configured list");
    cmd->add_option("--jobs", opts.jobs, "concurrent seed runs")->check(CLI::PositiveNumber);
}

drqlab::ExperimentConfig load(const CommonOptions& opts) {
    drqlab::ExperimentConfig config = drqlab::load_config(opts.config_path);
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    if (opts.seed) config.seeds = {*opts.seed};
    config.resolve();
    return config;
}

void print_artifacts(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust Q-learning experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* train = app.add_subcommand("train", "train every seed, evaluate, write curves and evals");
    auto* evaluate = app.add_subcommand("evaluate", "re-evaluate saved Q tables over the perturbation list");
    auto* oracle = app.add_subcommand("oracle", "solve the robust MDP exactly and write the oracle Q table");
    auto* sweep = app.add_subcommand("sweep", "run the sweep_k x sweep_rho grid and write summary.csv");
    for (auto* cmd : {train, evaluate, oracle, sweep}) add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        drqlab::ExperimentConfig config = load(opts);
        std::cerr << fmt::format("kernels: {}\n", drqlab::kernels::backend_name(drqlab::kernels::active_backend()));
        if (train->parsed()) {
            if (config.algorithm == drqlab::Algorithm::oracle)
                throw drqlab::ConfigError(0, "algorithm = oracle: use the oracle subcommand");
            const auto result = drqlab::run_experiment(config, opts.jobs);
            print_artifacts(result.artifacts);
            std::cout << fmt::format("oracle value at start state: {}\n", result.oracle_value);
        } else if (evaluate->parsed()) {
            print_artifacts(drqlab::evaluate_saved(config));
        } else if (oracle->parsed()) {
            config.algorithm = drqlab::Algorithm::oracle;
            const auto result = drqlab::run_experiment(config, opts.jobs);
            print_artifacts(result.artifacts);
            std::cout << fmt::format("oracle value at start state: {}\n", result.oracle_value);
        } else if (sweep->parsed()) {
            const auto rows = drqlab::sweep(drqlab::expand_sweep(config), config.out_dir, opts.jobs);
            std::size_t failed = 0;
            for (const auto& r : rows) failed += r.failed ? 1 : 0;
            std::cout << (config.out_dir / "summary.csv").string() << '\n';
            if (failed > 0) {
                std::cerr << fmt::format("{} sweep configuration(s) failed\n", failed);
                return kExitRuntime;
            }
        }
    } catch (const drqlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
