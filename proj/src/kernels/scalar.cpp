#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drqlab/kernels.hpp"
#include "power.hpp"

namespace drqlab::kernels::scalar {

using detail::positive_power;

double shortfall_power_sum(std::span<const double> values, std::span<const double> weights,
                           double eta, double power) {
    double sum = 0.0;
    if (weights.empty()) {
        for (double x : values) sum += positive_power(std::max(eta - x, 0.0), power);
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            sum += weights[i] * positive_power(std::max(eta - values[i], 0.0), power);
    }
    return sum;
}

ShortfallSums shortfall_power_sums(std::span<const double> values,
                                   std::span<const double> weights, double eta,
                                   double high_power, double low_power) {
    ShortfallSums out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = std::max(eta - values[i], 0.0);
        const double w = weights.empty() ? 1.0 : weights[i];
        out.high += w * positive_power(d, high_power);
        out.low += w * positive_power(d, low_power);
    }
    return out;
}

void row_max(std::span<const double> table, std::size_t cols, std::span<double> out) {
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double* row = table.data() + r * cols;
        double m = row[0];
        for (std::size_t c = 1; c < cols; ++c) m = std::max(m, row[c]);
        out[r] = m;
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace drqlab::kernels::scalar
