#pragma once

#include <cstddef>

#include "drqlab/cressie_read.hpp"
#include "drqlab/mdp.hpp"

namespace drqlab {

struct ViResult {
    QTable q_star;
    std::size_t iterations = 0;
    double final_residual = 0.0;  // sup-norm change in the last sweep
    bool converged = false;
};

/// Robust Bellman optimality operator:
///   T(Q)(s,a) = rbar(s,a) + gamma * sup_eta sigma_k(max_a' Q(., a'), eta)
/// with the expectation taken under the nominal row P(. | s, a).
QTable dr_bellman(const TabularMdp& mdp, const CressieReadParams& params, const QTable& q);

/// Iterates dr_bellman from the zero table until the sup-norm change is at
/// most `tol` or `max_iters` sweeps have run (reported, not thrown).
ViResult robust_value_iteration(const TabularMdp& mdp, const CressieReadParams& params,
                                double tol = 1e-8, std::size_t max_iters = 100000);

/// Maximum-likelihood model from `samples_per_pair` generative draws per
/// (s, a). Rewards, discount, initial distribution and terminal states are
/// copied from the true model. Consumes S * A * samples_per_pair samples.
TabularMdp empirical_mdp(const TabularMdp& true_mdp, std::size_t samples_per_pair, RngStream& rng);

}  // namespace drqlab
