#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drqlab/kernels.hpp"
#include "power.hpp"

namespace drqlab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

enum class PowerKind { one, two, general };

inline PowerKind classify(double power) {
    if (power == 1.0) return PowerKind::one;
    if (power == 2.0) return PowerKind::two;
    return PowerKind::general;
}

// d is the vector of non-negative shortfalls.
inline __m256d apply_power(__m256d d, PowerKind kind, double power) {
    switch (kind) {
        case PowerKind::one:
            return d;
        case PowerKind::two:
            return _mm256_mul_pd(d, d);
        case PowerKind::general: {
            alignas(32) double lanes[4];
            _mm256_store_pd(lanes, d);
            for (double& x : lanes) x = x > 0.0 ? std::pow(x, power) : 0.0;
            return _mm256_load_pd(lanes);
        }
    }
    return d;
}

}  // namespace

double shortfall_power_sum(std::span<const double> values, std::span<const double> weights,
                           double eta, double power) {
    const std::size_t n = values.size();
    const PowerKind kind = classify(power);
    const __m256d eta_v = _mm256_set1_pd(eta);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc0 = zero;
    __m256d acc1 = zero;
    const double* x = values.data();
    const double* w = weights.empty() ? nullptr : weights.data();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_max_pd(_mm256_sub_pd(eta_v, _mm256_loadu_pd(x + i)), zero);
        __m256d d1 = _mm256_max_pd(_mm256_sub_pd(eta_v, _mm256_loadu_pd(x + i + 4)), zero);
        d0 = apply_power(d0, kind, power);
        d1 = apply_power(d1, kind, power);
        if (w) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), d0, acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), d1, acc1);
        } else {
            acc0 = _mm256_add_pd(acc0, d0);
            acc1 = _mm256_add_pd(acc1, d1);
        }
    }
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_max_pd(_mm256_sub_pd(eta_v, _mm256_loadu_pd(x + i)), zero);
        d = apply_power(d, kind, power);
        acc0 = w ? _mm256_fmadd_pd(_mm256_loadu_pd(w + i), d, acc0) : _mm256_add_pd(acc0, d);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = detail::positive_power(std::max(eta - x[i], 0.0), power);
        sum += w ? w[i] * d : d;
    }
    return sum;
}

ShortfallSums shortfall_power_sums(std::span<const double> values,
                                   std::span<const double> weights, double eta,
                                   double high_power, double low_power) {
    const std::size_t n = values.size();
    const PowerKind high_kind = classify(high_power);
    const PowerKind low_kind = classify(low_power);
    const __m256d eta_v = _mm256_set1_pd(eta);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc_high = zero;
    __m256d acc_low = zero;
    const double* x = values.data();
    const double* w = weights.empty() ? nullptr : weights.data();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_max_pd(_mm256_sub_pd(eta_v, _mm256_loadu_pd(x + i)), zero);
        __m256d h = apply_power(d, high_kind, high_power);
        __m256d l = apply_power(d, low_kind, low_power);
        if (w) {
            const __m256d wv = _mm256_loadu_pd(w + i);
            acc_high = _mm256_fmadd_pd(wv, h, acc_high);
            acc_low = _mm256_fmadd_pd(wv, l, acc_low);
        } else {
            acc_high = _mm256_add_pd(acc_high, h);
            acc_low = _mm256_add_pd(acc_low, l);
        }
    }
    ShortfallSums out{hsum(acc_high), hsum(acc_low)};
    for (; i < n; ++i) {
        const double d = std::max(eta - x[i], 0.0);
        const double wi = w ? w[i] : 1.0;
        out.high += wi * detail::positive_power(d, high_power);
        out.low += wi * detail::positive_power(d, low_power);
    }
    return out;
}

void row_max(std::span<const double> table, std::size_t cols, std::span<double> out) {
    const std::size_t rows = out.size();
    const double* t = table.data();
    std::size_t r = 0;
    if (cols == 2) {
        // Two rows per 256-bit load: [a0 a1 b0 b1] -> pairwise max.
        for (; r + 2 <= rows; r += 2) {
            const __m256d v = _mm256_loadu_pd(t + r * 2);
            const __m256d m = _mm256_max_pd(v, _mm256_permute_pd(v, 0b0101));
            out[r] = _mm256_cvtsd_f64(m);
            out[r + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(m, 1));
        }
    } else if (cols >= 4) {
        for (; r < rows; ++r) {
            const double* row = t + r * cols;
            __m256d m = _mm256_loadu_pd(row);
            std::size_t c = 4;
            for (; c + 4 <= cols; c += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(row + c));
            double best = hmax(m);
            for (; c < cols; ++c) best = std::max(best, row[c]);
            out[r] = best;
        }
    }
    for (; r < rows; ++r) {
        const double* row = t + r * cols;
        double m = row[0];
        for (std::size_t c = 1; c < cols; ++c) m = std::max(m, row[c]);
        out[r] = m;
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= a.size(); i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
    }
    double best = hmax(m);
    for (; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

}  // namespace drqlab::kernels::avx2
