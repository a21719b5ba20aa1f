#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Inner loops of the dual objective and the Bellman sweeps. Every kernel has
// a scalar reference implementation; an AVX2 variant is compiled on x86-64
// and selected at runtime when the CPU supports it. Results of the two
// backends agree up to floating-point summation order.

namespace drqlab::kernels {

enum class Backend { scalar, avx2 };

struct ShortfallSums {
    double high = 0.0;  // sum_i w_i (eta - x_i)_+^high_power
    double low = 0.0;   // sum_i w_i (eta - x_i)_+^low_power
};

/// sum_i w_i * max(eta - x_i, 0)^power. Empty `weights` means unit weights.
/// power must be positive; 1 and 2 are evaluated without pow().
double shortfall_power_sum(std::span<const double> values, std::span<const double> weights,
                           double eta, double power);

/// Both shortfall sums in one pass (Z1/Z2-style pairs of moments).
ShortfallSums shortfall_power_sums(std::span<const double> values,
                                   std::span<const double> weights, double eta,
                                   double high_power, double low_power);

/// out[s] = max over the `cols` entries of row s of the row-major `table`.
void row_max(std::span<const double> table, std::size_t cols, std::span<double> out);

/// max_i |a_i - b_i|; sizes must match.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

Backend active_backend();
/// Forces a backend; throws std::invalid_argument if it is not available.
void set_backend(Backend backend);
bool backend_available(Backend backend);
std::string_view backend_name(Backend backend);

namespace scalar {
double shortfall_power_sum(std::span<const double>, std::span<const double>, double, double);
ShortfallSums shortfall_power_sums(std::span<const double>, std::span<const double>, double,
                                   double, double);
void row_max(std::span<const double>, std::size_t, std::span<double>);
double max_abs_diff(std::span<const double>, std::span<const double>);
}  // namespace scalar

#if defined(DRQLAB_HAVE_AVX2)
namespace avx2 {
double shortfall_power_sum(std::span<const double>, std::span<const double>, double, double);
ShortfallSums shortfall_power_sums(std::span<const double>, std::span<const double>, double,
                                   double, double);
void row_max(std::span<const double>, std::size_t, std::span<double>);
double max_abs_diff(std::span<const double>, std::span<const double>);
}  // namespace avx2
#endif

}  // namespace drqlab::kernels
