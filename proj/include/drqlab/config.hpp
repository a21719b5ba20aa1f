#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drqlab/baselines.hpp"
#include "drqlab/drq.hpp"
#include "drqlab/envs.hpp"

namespace drqlab {

/// Parse or validation failure in an experiment config; `line` is 1-based,
/// 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class Algorithm { drq, qlearning, mlmc, model_based, oracle };

std::string to_string(Algorithm algorithm);
std::string to_string(DrqMode mode);

/// Fully resolved experiment description. Optional fields left empty in a
/// config file are filled from environment defaults by `resolve()`.
struct ExperimentConfig {
    std::string environment = "cliffwalking";
    std::optional<double> env_param;
    Algorithm algorithm = Algorithm::drq;
    double k = 2.0;
    double rho = 0.5;
    DrqMode mode = DrqMode::single_trajectory;
    double exploration_eps = 0.1;
    std::uint64_t total_steps = 100000;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::size_t eval_episodes = 100;
    std::optional<std::size_t> eval_max_steps;
    std::optional<std::vector<double>> perturbations;
    std::filesystem::path out_dir = "out";
    std::uint64_t curve_every = 10000;

    std::optional<RateFunction> z_rate;
    std::optional<RateFunction> eta_rate;
    std::optional<RateFunction> q_rate;

    double mlmc_epsilon = 0.5;
    RateFunction mlmc_rate{1.0, 1.0};
    std::size_t mlmc_max_level = 20;

    RandomMdpSpec random;
    double oracle_tol = 1e-8;

    std::vector<double> sweep_k;
    std::vector<double> sweep_rho;

    /// Fills environment-dependent defaults and validates invariants.
    /// Throws ConfigError.
    void resolve();

    CressieReadParams params() const { return {k, rho}; }
    StepSchedule schedule(double gamma) const;
    DrqConfig drq_config(double gamma) const;
    MlmcConfig mlmc_config() const;

    /// `key = value` lines in a fixed order; parse(to_text()) round-trips.
    std::string to_text() const;
};

/// Parses a flat `key = value` file body; `#` starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace drqlab
