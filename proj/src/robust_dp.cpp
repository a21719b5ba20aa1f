#include "drqlab/robust_dp.hpp"

#include <map>
#include <stdexcept>
#include <vector>

#include "drqlab/kernels.hpp"

namespace drqlab {

namespace {

void bellman_into(const TabularMdp& mdp, const CressieReadParams& params, const QTable& q,
                  QTable& out) {
    const std::vector<double> v = q.state_values();
    std::vector<double> values;
    std::vector<double> probs;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            values.clear();
            probs.clear();
            for (const Successor& succ : mdp.successors(s, a)) {
                if (succ.prob == 0.0) continue;
                values.push_back(v[succ.state]);
                probs.push_back(succ.prob);
            }
            const double robust = maximize_dual(values, probs, params).value;
            out(s, a) = mdp.expected_reward(s, a) + mdp.discount() * robust;
        }
    }
}

}  // namespace

QTable dr_bellman(const TabularMdp& mdp, const CressieReadParams& params, const QTable& q) {
    if (q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions())
        throw std::invalid_argument("dr_bellman: Q table shape does not match the MDP");
    QTable out(mdp.num_states(), mdp.num_actions());
    bellman_into(mdp, params, q, out);
    return out;
}

ViResult robust_value_iteration(const TabularMdp& mdp, const CressieReadParams& params, double tol,
                                std::size_t max_iters) {
    if (!(tol > 0.0)) throw std::invalid_argument("robust_value_iteration: tol must be positive");
    ViResult result{QTable(mdp.num_states(), mdp.num_actions()), 0, 0.0, false};
    QTable next(mdp.num_states(), mdp.num_actions());
    while (result.iterations < max_iters) {
        bellman_into(mdp, params, result.q_star, next);
        result.final_residual = kernels::max_abs_diff(next.values(), result.q_star.values());
        std::swap(result.q_star, next);
        ++result.iterations;
        if (result.final_residual <= tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

TabularMdp empirical_mdp(const TabularMdp& true_mdp, std::size_t samples_per_pair, RngStream& rng) {
    if (samples_per_pair == 0)
        throw std::invalid_argument("empirical_mdp: samples_per_pair must be >= 1");
    const std::size_t S = true_mdp.num_states();
    const std::size_t A = true_mdp.num_actions();
    std::vector<TabularMdp::Row> rows(S * A);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            std::map<std::size_t, std::size_t> counts;
            for (std::size_t i = 0; i < samples_per_pair; ++i)
                ++counts[sample_transition(true_mdp, StateId{s}, ActionId{a}, rng).s_next.index];
            // Outcome rewards are known; only the kernel is estimated.
            auto succ = true_mdp.successors(s, a);
            auto& row = rows[s * A + a];
            double assigned = 0.0;
            std::size_t remaining = counts.size();
            for (const auto& [next, count] : counts) {
                double reward = 0.0;
                for (const Successor& t : succ)
                    if (t.state == next) reward = t.reward;
                // The last entry absorbs rounding so the row sums to 1.
                const double p = --remaining == 0
                                     ? 1.0 - assigned
                                     : static_cast<double>(count) / static_cast<double>(samples_per_pair);
                assigned += p;
                row.push_back({next, p, reward});
            }
        }
    }
    return TabularMdp(S, A, std::move(rows), true_mdp.discount(), true_mdp.initial_distribution(),
                      true_mdp.terminal_states(), true_mdp.reward_scale());
}

}  // namespace drqlab
