// Primal worst-case expectation over a Cressie-Read ball. Used only as an
// independent check of the dual solver, so nothing here touches sigma_k.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "drqlab/cressie_read.hpp"

namespace drqlab {

namespace {

constexpr std::size_t kMaxOracleSupport = 8;

struct Problem {
    std::vector<double> x;
    std::vector<double> p;
    double k;
    double rho;

    double objective(std::span<const double> q) const {
        return std::inner_product(x.begin(), x.end(), q.begin(), 0.0);
    }
    bool feasible(std::span<const double> q) const { return divergence(q, p, k) <= rho; }
};

// Enumerates q over a grid of `res` steps per free coordinate inside the box
// [lo_i, lo_i + width] for each free coordinate; the last coordinate closes
// the simplex.
double grid_pass(const Problem& prob, const std::vector<double>& lo, double width, int res,
                 std::vector<double>& best_q, double best) {
    const std::size_t n = prob.x.size();
    std::vector<double> q(n);
    const double step = width / res;
    if (n == 2) {
        for (int i = 0; i <= res; ++i) {
            q[0] = std::clamp(lo[0] + i * step, 0.0, 1.0);
            q[1] = 1.0 - q[0];
            if (!prob.feasible(q)) continue;
            const double v = prob.objective(q);
            if (v < best) best = v, best_q = q;
        }
    } else {
        for (int i = 0; i <= res; ++i) {
            q[0] = std::clamp(lo[0] + i * step, 0.0, 1.0);
            for (int j = 0; j <= res; ++j) {
                q[1] = std::clamp(lo[1] + j * step, 0.0, 1.0);
                q[2] = 1.0 - q[0] - q[1];
                if (q[2] < 0.0) {
                    if (q[2] < -1e-15) break;
                    q[2] = 0.0;
                }
                if (!prob.feasible(q)) continue;
                const double v = prob.objective(q);
                if (v < best) best = v, best_q = q;
            }
        }
    }
    return best;
}

double grid_oracle(const Problem& prob, int res) {
    const std::size_t free = prob.x.size() - 1;
    std::vector<double> best_q = prob.p;
    double best = prob.objective(prob.p);  // q = p is always feasible
    best = grid_pass(prob, std::vector<double>(free, 0.0), 1.0, res, best_q, best);
    // Refinement: a +-2 cell neighbourhood of the incumbent at the same resolution.
    const double cell = 1.0 / res;
    std::vector<double> lo(free);
    for (std::size_t i = 0; i < free; ++i) lo[i] = best_q[i] - 2.0 * cell;
    return grid_pass(prob, lo, 4.0 * cell, res, best_q, best);
}

// Log-barrier method for  min x.q  s.t.  sum q = 1, q > 0, D(q||p) < rho.
double barrier_oracle(const Problem& prob) {
    const auto n = static_cast<Eigen::Index>(prob.x.size());
    const double k = prob.k;
    const double rho = prob.rho;
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(prob.x.data(), n);
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(prob.p.data(), n);
    Eigen::VectorXd q = p;

    auto div = [&](const Eigen::VectorXd& v) {
        return divergence(std::span<const double>(v.data(), static_cast<std::size_t>(n)), prob.p, k);
    };
    auto barrier_value = [&](const Eigen::VectorXd& v, double t) {
        const double slack = rho - div(v);
        if (!(slack > 0.0) || (v.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
        return t * x.dot(v) - std::log(slack) - v.array().log().sum();
    };

    const double constraints = static_cast<double>(n + 1);
    for (double t = 1.0; constraints / t > 1e-9; t *= 8.0) {
        for (int iter = 0; iter < 200; ++iter) {
            const Eigen::ArrayXd ratio = q.array() / p.array();
            const double slack = rho - div(q);
            const Eigen::VectorXd grad_d = ((ratio.pow(k - 1.0) - 1.0) / (k - 1.0)).matrix();
            const Eigen::VectorXd hess_d = (ratio.pow(k - 2.0) / p.array()).matrix();

            const Eigen::VectorXd grad =
                t * x + grad_d / slack - q.cwiseInverse();
            Eigen::MatrixXd hess = grad_d * grad_d.transpose() / (slack * slack);
            hess.diagonal() += hess_d / slack + q.cwiseInverse().cwiseAbs2();

            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
            kkt.topLeftCorner(n, n) = hess;
            kkt.block(0, n, n, 1).setOnes();
            kkt.block(n, 0, 1, n).setOnes();
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
            rhs.head(n) = -grad;
            const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
            const Eigen::VectorXd dq = sol.head(n);

            const double decrement = -grad.dot(dq);
            if (decrement / 2.0 < 1e-13) break;

            const double f0 = barrier_value(q, t);
            double step = 1.0;
            Eigen::VectorXd trial = q + step * dq;
            while (barrier_value(trial, t) > f0 - 0.25 * step * decrement) {
                step *= 0.5;
                if (step < 1e-16) break;
                trial = q + step * dq;
            }
            if (step < 1e-16) break;
            q = trial;
        }
    }
    return x.dot(q);
}

}  // namespace

double primal_robust_expectation(const DiscreteDistribution& dist, const CressieReadParams& params,
                                 int grid_resolution) {
    if (dist.size() > kMaxOracleSupport)
        throw std::invalid_argument("primal_robust_expectation: support larger than 8 atoms");
    if (grid_resolution < 200)
        throw std::invalid_argument("primal_robust_expectation: grid resolution must be >= 200");

    // Atoms without nominal mass cannot receive mass (absolute continuity).
    Problem prob{{}, {}, params.k(), params.rho()};
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.probs()[i] > 0.0) {
            prob.x.push_back(dist.values()[i]);
            prob.p.push_back(dist.probs()[i]);
        }
    }
    if (params.rho() == 0.0 || prob.x.size() == 1) return prob.objective(prob.p);
    if (prob.x.size() <= 3) return grid_oracle(prob, grid_resolution);
    return barrier_oracle(prob);
}

}  // namespace drqlab
