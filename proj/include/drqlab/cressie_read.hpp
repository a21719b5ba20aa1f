#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Cressie-Read f-divergence ambiguity sets,
//   f_k(t) = (t^k - k t + k - 1) / (k (k - 1)),  k > 1,
// and the one-dimensional dual of the worst-case expectation over the ball
// {Q : D_{f_k}(Q || P) <= rho}:
//   inf_Q E_Q[X] = sup_eta  eta - c_k(rho) * E_P[(eta - X)_+^{k*}]^{1/k*},
// with k* = k / (k - 1) and c_k(rho) = (1 + k (k - 1) rho)^{1/k}.

namespace drqlab {

/// c_k(rho) = (1 + k (k - 1) rho)^{1/k}. Throws for k <= 1 or rho < 0.
double penalty_coefficient(double k, double rho);

/// k* = k / (k - 1). Throws for k <= 1.
double conjugate_exponent(double k);

/// (k, rho) with the derived quantities recomputed on every change.
class CressieReadParams {
public:
    CressieReadParams(double k, double rho);

    double k() const { return k_; }
    double rho() const { return rho_; }
    double k_star() const { return k_star_; }
    double c_k() const { return c_k_; }

    void set_k(double k) { *this = CressieReadParams(k, rho_); }
    void set_rho(double rho) { *this = CressieReadParams(k_, rho); }

    /// Upper end of the dual-variable range for values in [0, bound]:
    /// c_k / (c_k - 1) * bound, or +inf when rho = 0.
    double eta_ceiling(double bound) const;

private:
    double k_;
    double rho_;
    double k_star_;
    double c_k_;
};

/// Finite discrete random variable: values[i] with probability probs[i].
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> values, std::vector<double> probs);

    std::span<const double> values() const { return values_; }
    std::span<const double> probs() const { return probs_; }
    std::size_t size() const { return values_.size(); }
    double mean() const;

private:
    std::vector<double> values_;
    std::vector<double> probs_;
};

/// sigma_k(X, eta). When no mass lies below eta the result is exactly eta.
double dual_objective(const DiscreteDistribution& dist, double eta, const CressieReadParams& params);

/// d sigma / d eta = 1 - c_k Z1^{1/k* - 1} Z2 with Z1 = E(eta - X)_+^{k*},
/// Z2 = E(eta - X)_+^{k* - 1}. Returns 1 when Z1 <= 1e-12 (eta at or below
/// the support).
double dual_subgradient(const DiscreteDistribution& dist, double eta, const CressieReadParams& params);

struct DualSolution {
    double value = 0.0;
    double eta_star = 0.0;
};

/// sup_eta sigma_k(X, eta) by golden-section search on
/// [min X, min X + c_k / (c_k - 1) (max X - min X)] to bracket width 1e-10.
/// rho = 0 returns the plain mean with eta_star = max X.
DualSolution robust_expectation(const DiscreteDistribution& dist, const CressieReadParams& params);

/// Span-based core of robust_expectation. Empty `probs` means the uniform
/// empirical measure over `values` (the sample-average functional).
DualSolution maximize_dual(std::span<const double> values, std::span<const double> probs,
                           const CressieReadParams& params);

/// D_{f_k}(q || p) = sum_i p_i f_k(q_i / p_i); +inf when q puts mass where p
/// has none. Terms with p_i = q_i = 0 contribute zero.
double divergence(std::span<const double> q, std::span<const double> p, double k);

/// Brute-force primal oracle: min_q E_q[X] s.t. D(q || p) <= rho, for
/// supports of at most 8 atoms. Supports with at most two free coordinates
/// are solved by grid enumeration at `grid_resolution` points per
/// coordinate (refined once around the incumbent, accuracy O(1/resolution));
/// larger supports use a primal log-barrier Newton method. Neither path uses
/// the dual. Throws std::invalid_argument above 8 atoms or for
/// grid_resolution < 200.
double primal_robust_expectation(const DiscreteDistribution& dist, const CressieReadParams& params,
                                 int grid_resolution = 400);

}  // namespace drqlab
