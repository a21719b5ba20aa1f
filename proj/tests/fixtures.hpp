#pragma once

#include <cmath>
#include <vector>

#include "drqlab/mdp.hpp"

namespace fixtures {

using drqlab::TabularMdp;

// One non-terminal state looping on itself with reward r.
inline TabularMdp self_loop(double r = 1.0, double gamma = 0.9) {
    return TabularMdp::from_dense(1, 1, {{1.0}}, {r}, gamma, {1.0});
}

// s0: reward 1, moves to {s0, s1} with probability 1/2 each; s1 absorbing, reward 0.
inline TabularMdp two_state_chain(double gamma = 0.9) {
    return TabularMdp::from_dense(2, 1, {{0.5, 0.5}, {0.0, 1.0}}, {1.0, 0.0}, gamma, {1.0, 0.0}, {1});
}

// 0 -> 1 -> 2 -> 3 (terminal), reward 1 on each move.
inline TabularMdp chain3(double gamma = 0.9) {
    return TabularMdp::from_dense(4, 1,
                                  {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 1}},
                                  {1.0, 1.0, 1.0, 0.0}, gamma, {1, 0, 0, 0}, {3});
}

// Plain value iteration for the non-robust problem, written without the
// library's dual machinery.
inline std::vector<double> classical_q(const TabularMdp& mdp, double tol = 1e-12) {
    const std::size_t S = mdp.num_states(), A = mdp.num_actions();
    std::vector<double> q(S * A, 0.0), next(S * A);
    for (int it = 0; it < 100000; ++it) {
        std::vector<double> v(S);
        for (std::size_t s = 0; s < S; ++s) {
            v[s] = q[s * A];
            for (std::size_t a = 1; a < A; ++a) v[s] = std::max(v[s], q[s * A + a]);
        }
        double diff = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                double x = 0.0;
                for (const auto& succ : mdp.successors(s, a)) x += succ.prob * (succ.reward + mdp.discount() * v[succ.state]);
                next[s * A + a] = x;
                diff = std::max(diff, std::abs(x - q[s * A + a]));
            }
        q.swap(next);
        if (diff <= tol) break;
    }
    return q;
}

}  // namespace fixtures
