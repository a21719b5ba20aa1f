#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "drqlab/cressie_read.hpp"
#include "drqlab/curve.hpp"
#include "drqlab/drq.hpp"
#include "drqlab/mdp.hpp"

namespace drqlab {

/// Classical Q-learning step on the visited entry:
/// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s', a')).
void q_learning_update(QTable& q, const TransitionSample& sample, double alpha, double gamma);

/// Non-robust Q-learning on a single epsilon-greedy trajectory with
/// per-(s, a) clock rate(t) (the same terminal handling as DRQ).
std::pair<QTable, TrainingCurve> train_q_learning(const TabularMdp& mdp, double exploration_eps,
                                                  const RateFunction& rate,
                                                  std::uint64_t total_steps, RngStream& rng,
                                                  std::uint64_t curve_every);

/// r + gamma * sup_eta { eta - c_k (eta - y)_+ } for the single observed
/// next-state value y, solved with the same dual maximizer as the exact
/// operator. It always equals the non-robust target r + gamma * y: a
/// one-sample plug-in estimate carries no information about the ball.
double one_sample_dual_collapse(const QTable& q, const TransitionSample& sample,
                                const CressieReadParams& params, double gamma);

/// sup_eta of the sample-average dual functional over `values`.
double empirical_dual_sup(std::span<const double> values, const CressieReadParams& params);

struct MlmcConfig {
    CressieReadParams params{2.0, 0.5};
    double epsilon_level = 0.5;  // P(N = n) = eps (1 - eps)^n, eps in (0, 0.5]
    RateFunction rate{1.0, 1.0};
    std::size_t max_level = 20;  // batches of at most 2^(max_level + 1) samples
};

/// Level N with P(N = n) = eps (1 - eps)^n via one uniform variate, capped at max_level.
std::size_t mlmc_level_sample(double epsilon_level, RngStream& rng, std::size_t max_level = 20);

struct MlmcEstimate {
    double value = 0.0;
    std::size_t level = 0;
    std::uint64_t samples = 0;
};

/// Multilevel Monte-Carlo estimate of the robust Bellman target at (s, a):
/// r_1 + Delta_r / p_N + gamma (max_a' Q(s'_1, a') + Delta_q / p_N), where
/// Delta compares the sample-average dual sup on 2^(N+1) draws with the
/// average of the sups on its two halves.
MlmcEstimate mlmc_bellman_estimate(const TabularMdp& mdp, StateId s, ActionId a, const QTable& q,
                                   const MlmcConfig& config, RngStream& rng);

struct MlmcResult {
    QTable q;
    TrainingCurve curve;
    std::uint64_t total_samples = 0;
};

/// Simulator-based robust Q iteration: every sweep replaces each entry by
/// (1 - rate(t)) Q + rate(t) * estimate, all estimates formed from the
/// table at the start of the sweep. Curve steps are sweep indices.
MlmcResult mlmc_train(const TabularMdp& mdp, const MlmcConfig& config, std::uint64_t sweeps,
                      RngStream& rng, std::uint64_t curve_every);

}  // namespace drqlab
