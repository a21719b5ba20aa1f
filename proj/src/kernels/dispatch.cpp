#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "drqlab/kernels.hpp"

namespace drqlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DRQLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

// DRQLAB_KERNELS=scalar pins the reference path (useful when comparing
// output files across machines).
Backend detect() {
    if (const char* env = std::getenv("DRQLAB_KERNELS"); env && std::string(env) == "scalar")
        return Backend::scalar;
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool backend_available(Backend backend) {
    return backend == Backend::scalar || cpu_has_avx2();
}

void set_backend(Backend backend) {
    if (!backend_available(backend))
        throw std::invalid_argument("kernel backend not available: " +
                                    std::string(backend_name(backend)));
    current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

namespace {

void check_shortfall_args(std::span<const double> values, std::span<const double> weights,
                          double power) {
    if (!weights.empty() && weights.size() != values.size())
        throw std::invalid_argument("shortfall sum: weights and values differ in length");
    if (!(power > 0.0)) throw std::invalid_argument("shortfall sum: power must be positive");
}

}  // namespace

double shortfall_power_sum(std::span<const double> values, std::span<const double> weights,
                           double eta, double power) {
    check_shortfall_args(values, weights, power);
#if defined(DRQLAB_HAVE_AVX2)
    if (active_backend() == Backend::avx2)
        return avx2::shortfall_power_sum(values, weights, eta, power);
#endif
    return scalar::shortfall_power_sum(values, weights, eta, power);
}

ShortfallSums shortfall_power_sums(std::span<const double> values,
                                   std::span<const double> weights, double eta,
                                   double high_power, double low_power) {
    check_shortfall_args(values, weights, std::min(high_power, low_power));
#if defined(DRQLAB_HAVE_AVX2)
    if (active_backend() == Backend::avx2)
        return avx2::shortfall_power_sums(values, weights, eta, high_power, low_power);
#endif
    return scalar::shortfall_power_sums(values, weights, eta, high_power, low_power);
}

void row_max(std::span<const double> table, std::size_t cols, std::span<double> out) {
    if (cols == 0 || table.size() != cols * out.size())
        throw std::invalid_argument("row_max: table shape mismatch");
#if defined(DRQLAB_HAVE_AVX2)
    if (active_backend() == Backend::avx2) return avx2::row_max(table, cols, out);
#endif
    scalar::row_max(table, cols, out);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
#if defined(DRQLAB_HAVE_AVX2)
    if (active_backend() == Backend::avx2) return avx2::max_abs_diff(a, b);
#endif
    return scalar::max_abs_diff(a, b);
}

}  // namespace drqlab::kernels
