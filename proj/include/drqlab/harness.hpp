#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drqlab/config.hpp"
#include "drqlab/curve.hpp"
#include "drqlab/mdp.hpp"
#include "drqlab/robust_dp.hpp"

namespace drqlab {

struct EvalStats {
    double perturbation = 0.0;
    double mean_disc = 0.0;
    double std_disc = 0.0;
    double mean_undisc = 0.0;
    double std_undisc = 0.0;
    double mean_len = 0.0;
    double std_len = 0.0;
    std::size_t episodes = 0;
    std::uint64_t seed = 0;
};

/// Greedy (eps = 0) rollouts; returns in raw reward units. Standard
/// deviations use the n - 1 denominator (0 for a single episode).
EvalStats evaluate_policy(const TabularMdp& mdp, const QTable& q, std::size_t episodes,
                          std::size_t max_steps, RngStream& rng);

inline constexpr const char* kCurveHeader = "step,estimate,oracle,cum_samples";
inline constexpr const char* kEvalHeader =
    "perturbation,mean_disc,std_disc,mean_undisc,std_undisc,mean_len,std_len,episodes,seed";
inline constexpr const char* kSummaryHeader = "k,rho,perturbation,oracle_value,mean_disc,std_disc";

struct SeedRun {
    std::uint64_t seed = 0;
    QTable q;
    TrainingCurve curve;
    std::vector<EvalStats> evals;
};

struct ExperimentResult {
    ExperimentConfig config;
    QTable oracle_q;
    double oracle_value = 0.0;
    std::vector<SeedRun> runs;  // sorted by seed
    std::vector<std::filesystem::path> artifacts;
};

/// Exact robust solution for the config's nominal model and (k, rho);
/// rho is taken as 0 for non-robust Q-learning.
ViResult solve_oracle(const ExperimentConfig& config);

/// Trains on one seed and evaluates over the perturbation list. Everything
/// random derives from the seed, so the result is reproducible bit for bit.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, double oracle_value);

/// Trains every seed (up to `jobs` concurrently), evaluates, and writes
/// curve_seed<k>.csv, eval_seed<k>.csv, q_seed<k>.csv and manifest.txt into
/// config.out_dir. algorithm = oracle writes only oracle_q.csv,
/// oracle_value.csv and the manifest. Throws ConfigError for invalid
/// configs and std::runtime_error for I/O failures.
ExperimentResult run_experiment(ExperimentConfig config, std::size_t jobs = 1);

/// Re-evaluates saved q_seed<k>.csv tables in config.out_dir and rewrites
/// the matching eval_seed<k>.csv files.
std::vector<std::filesystem::path> evaluate_saved(ExperimentConfig config);

struct SweepRow {
    double k = 0.0;
    double rho = 0.0;
    double perturbation = 0.0;
    double oracle_value = 0.0;
    double mean_disc = 0.0;
    double std_disc = 0.0;
    bool failed = false;
};

/// Runs each config and aggregates evaluation statistics (pooled over all
/// seeds' episodes) into <out>/summary.csv keyed by (k, rho, perturbation).
/// A failing config produces a row of NaNs and does not stop the sweep.
std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs,
                            const std::filesystem::path& out_dir, std::size_t jobs = 1);

/// Expands sweep_k x sweep_rho of a base config into per-cell configs with
/// out_dir = <base out>/k<k>_rho<rho>.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base);

/// CSV writers, exposed for tests.
std::string curve_csv(const TrainingCurve& curve);
std::string eval_csv(const std::vector<EvalStats>& stats);
std::string q_csv(const QTable& q);
QTable parse_q_csv(const std::string& text);

}  // namespace drqlab
