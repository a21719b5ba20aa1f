#include "drqlab/cressie_read.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "drqlab/kernels.hpp"

namespace drqlab {

namespace {

constexpr double kGoldenBracketWidth = 1e-10;
constexpr double kZ1Floor = 1e-12;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

void require_k(double k, const char* where) {
    if (!(k > 1.0) || !std::isfinite(k))
        throw std::invalid_argument(std::string(where) + ": k must be a finite number > 1");
}

// Mean of (eta - X)_+^{k*} under probs (or uniform when probs is empty).
double shortfall_moment(std::span<const double> values, std::span<const double> probs, double eta,
                        double power) {
    const double sum = kernels::shortfall_power_sum(values, probs, eta, power);
    return probs.empty() ? sum / static_cast<double>(values.size()) : sum;
}

double sigma(std::span<const double> values, std::span<const double> probs, double eta,
             const CressieReadParams& params) {
    const double z1 = shortfall_moment(values, probs, eta, params.k_star());
    if (z1 == 0.0) return eta;
    return eta - params.c_k() * std::pow(z1, 1.0 / params.k_star());
}

}  // namespace

double penalty_coefficient(double k, double rho) {
    require_k(k, "penalty_coefficient");
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("penalty_coefficient: rho must be finite and >= 0");
    if (rho == 0.0) return 1.0;
    return std::pow(1.0 + k * (k - 1.0) * rho, 1.0 / k);
}

double conjugate_exponent(double k) {
    require_k(k, "conjugate_exponent");
    return k / (k - 1.0);
}

CressieReadParams::CressieReadParams(double k, double rho)
    : k_(k), rho_(rho), k_star_(conjugate_exponent(k)), c_k_(penalty_coefficient(k, rho)) {}

double CressieReadParams::eta_ceiling(double bound) const {
    if (c_k_ == 1.0) return std::numeric_limits<double>::infinity();
    return c_k_ / (c_k_ - 1.0) * bound;
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
    if (values_.empty()) throw std::invalid_argument("DiscreteDistribution: empty support");
    if (values_.size() != probs_.size())
        throw std::invalid_argument("DiscreteDistribution: values and probs differ in length");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw std::invalid_argument("DiscreteDistribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteDistribution: probabilities do not sum to 1");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("DiscreteDistribution: non-finite value");
}

double DiscreteDistribution::mean() const {
    return std::inner_product(values_.begin(), values_.end(), probs_.begin(), 0.0);
}

double dual_objective(const DiscreteDistribution& dist, double eta, const CressieReadParams& params) {
    return sigma(dist.values(), dist.probs(), eta, params);
}

double dual_subgradient(const DiscreteDistribution& dist, double eta, const CressieReadParams& params) {
    const double ks = params.k_star();
    const auto sums = kernels::shortfall_power_sums(dist.values(), dist.probs(), eta, ks, ks - 1.0);
    if (sums.high <= kZ1Floor) return 1.0;
    return 1.0 - params.c_k() * std::pow(sums.high, 1.0 / ks - 1.0) * sums.low;
}

DualSolution maximize_dual(std::span<const double> values, std::span<const double> probs,
                           const CressieReadParams& params) {
    if (values.empty()) throw std::invalid_argument("maximize_dual: empty support");
    if (!probs.empty() && probs.size() != values.size())
        throw std::invalid_argument("maximize_dual: values and probs differ in length");
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo0 = *min_it;
    const double hi_value = *max_it;

    if (params.c_k() == 1.0) {
        const double mean =
            probs.empty() ? std::accumulate(values.begin(), values.end(), 0.0) /
                                static_cast<double>(values.size())
                          : std::inner_product(values.begin(), values.end(), probs.begin(), 0.0);
        return {mean, hi_value};
    }

    // sigma is concave; the maximizer lies in [min X, min X + c/(c-1) (max X - min X)].
    double lo = lo0;
    double hi = lo0 + params.eta_ceiling(hi_value - lo0);

    DualSolution best{sigma(values, probs, lo, params), lo};
    auto consider = [&](double eta, double value) {
        if (value > best.value) best = {value, eta};
    };
    if (hi - lo <= kGoldenBracketWidth) return best;
    consider(hi, sigma(values, probs, hi, params));

    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = sigma(values, probs, x1, params);
    double f2 = sigma(values, probs, x2, params);
    while (hi - lo > kGoldenBracketWidth) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = sigma(values, probs, x2, params);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = sigma(values, probs, x1, params);
        }
    }
    consider(x1, f1);
    consider(x2, f2);
    return best;
}

DualSolution robust_expectation(const DiscreteDistribution& dist, const CressieReadParams& params) {
    return maximize_dual(dist.values(), dist.probs(), params);
}

double divergence(std::span<const double> q, std::span<const double> p, double k) {
    require_k(k, "divergence");
    if (q.size() != p.size()) throw std::invalid_argument("divergence: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (p[i] == 0.0) {
            if (q[i] > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        const double t = q[i] / p[i];
        total += p[i] * (std::pow(t, k) - k * t + k - 1.0) / (k * (k - 1.0));
    }
    return total;
}

}  // namespace drqlab
