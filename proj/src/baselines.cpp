#include "drqlab/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace drqlab {

void q_learning_update(QTable& q, const TransitionSample& sample, double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("q_learning_update: alpha outside (0, 1]");
    const double target = sample.r + gamma * q.state_value(sample.s_next.index);
    double& entry = q(sample.s.index, sample.a.index);
    entry = (1.0 - alpha) * entry + alpha * target;
}

std::pair<QTable, TrainingCurve> train_q_learning(const TabularMdp& mdp, double exploration_eps,
                                                  const RateFunction& rate,
                                                  std::uint64_t total_steps, RngStream& rng,
                                                  std::uint64_t curve_every) {
    QTable q(mdp.num_states(), mdp.num_actions());
    TrainingCurve curve;
    std::vector<std::uint64_t> visits(mdp.num_pairs(), 0);
    const double omg = 1.0 - mdp.discount();
    const std::size_t s0 = mdp.start_state();

    pin_terminal_values(mdp, q);
    StateId s = sample_initial_state(mdp, rng);
    for (std::uint64_t n = 1; n <= total_steps; ++n) {
        while (mdp.is_terminal(s.index)) s = sample_initial_state(mdp, rng);
        const ActionId a = epsilon_greedy(q, s, exploration_eps, rng);
        const TransitionSample sample = sample_transition(mdp, s, a, rng);
        const std::uint64_t clock = ++visits[s.index * mdp.num_actions() + a.index];
        q_learning_update(q, sample, rate(omg, clock), mdp.discount());
        s = sample.s_next;
        if (n == total_steps || (curve_every > 0 && n % curve_every == 0))
            curve.record(n, q.state_value(s0), n);
    }
    return {std::move(q), std::move(curve)};
}

double one_sample_dual_collapse(const QTable& q, const TransitionSample& sample,
                                const CressieReadParams& params, double gamma) {
    const double y = q.state_value(sample.s_next.index);
    return sample.r + gamma * maximize_dual(std::span<const double>(&y, 1), {}, params).value;
}

double empirical_dual_sup(std::span<const double> values, const CressieReadParams& params) {
    if (values.empty()) throw std::invalid_argument("empirical_dual_sup: no samples");
    return maximize_dual(values, {}, params).value;
}

std::size_t mlmc_level_sample(double epsilon_level, RngStream& rng, std::size_t max_level) {
    if (!(epsilon_level > 0.0 && epsilon_level <= 0.5))
        throw std::invalid_argument("mlmc_level_sample: level parameter outside (0, 0.5]");
    // P(N >= n) = (1 - eps)^n  <=>  N = floor(log(1 - u) / log(1 - eps)).
    const double u = rng.uniform();
    const double n = std::floor(std::log1p(-u) / std::log1p(-epsilon_level));
    if (!(n < static_cast<double>(max_level))) return max_level;
    return static_cast<std::size_t>(n);
}

namespace {

// sup over the whole batch minus the mean of the sups over its two halves.
double level_difference(std::span<const double> batch, const CressieReadParams& params) {
    const std::size_t half = batch.size() / 2;
    return empirical_dual_sup(batch, params) -
           0.5 * empirical_dual_sup(batch.first(half), params) -
           0.5 * empirical_dual_sup(batch.subspan(half), params);
}

}  // namespace

MlmcEstimate mlmc_bellman_estimate(const TabularMdp& mdp, StateId s, ActionId a, const QTable& q,
                                   const MlmcConfig& config, RngStream& rng) {
    const std::size_t level = mlmc_level_sample(config.epsilon_level, rng, config.max_level);
    const std::size_t batch = std::size_t{1} << (level + 1);
    std::vector<double> rewards(batch);
    std::vector<double> values(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const TransitionSample t = sample_transition(mdp, s, a, rng);
        rewards[i] = t.r;
        values[i] = q.state_value(t.s_next.index);
    }
    const double p_level =
        config.epsilon_level * std::pow(1.0 - config.epsilon_level, static_cast<double>(level));
    const double delta_r = level_difference(rewards, config.params);
    const double delta_q = level_difference(values, config.params);
    const double value =
        rewards[0] + delta_r / p_level + mdp.discount() * (values[0] + delta_q / p_level);
    return {value, level, batch};
}

MlmcResult mlmc_train(const TabularMdp& mdp, const MlmcConfig& config, std::uint64_t sweeps,
                      RngStream& rng, std::uint64_t curve_every) {
    MlmcResult result{QTable(mdp.num_states(), mdp.num_actions()), {}, 0};
    const double omg = 1.0 - mdp.discount();
    const std::size_t s0 = mdp.start_state();
    pin_terminal_values(mdp, result.q);
    QTable next = result.q;
    for (std::uint64_t t = 1; t <= sweeps; ++t) {
        const double rate = config.rate(omg, t);
        for (std::size_t s = 0; s < mdp.num_states(); ++s) {
            if (mdp.is_terminal(s)) continue;
            for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
                const MlmcEstimate est =
                    mlmc_bellman_estimate(mdp, StateId{s}, ActionId{a}, result.q, config, rng);
                result.total_samples += est.samples;
                next(s, a) = (1.0 - rate) * result.q(s, a) + rate * est.value;
            }
        }
        std::swap(result.q, next);
        if (t == sweeps || (curve_every > 0 && t % curve_every == 0))
            result.curve.record(t, result.q.state_value(s0), result.total_samples);
    }
    return result;
}

}  // namespace drqlab
