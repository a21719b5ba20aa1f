#include <doctest.h>

#include <cmath>
#include <vector>

#include "drqlab/kernels.hpp"
#include "drqlab/rng.hpp"

using namespace drqlab;
namespace k = drqlab::kernels;

namespace {

std::vector<double> random_vector(RngStream& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

// Naive reference, independent of both backends.
double naive_shortfall(const std::vector<double>& x, const std::vector<double>& w, double eta, double p) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = eta - x[i];
        if (d > 0) s += (w.empty() ? 1.0 : w[i]) * std::pow(d, p);
    }
    return s;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

struct BackendGuard {
    k::Backend saved = k::active_backend();
    ~BackendGuard() { k::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar shortfall sums match the naive loop") {
    RngStream rng(21);
    for (std::size_t n : {0u, 1u, 3u, 8u, 17u, 64u}) {
        const auto x = random_vector(rng, n, 0, 10);
        const auto w = random_vector(rng, n, 0, 1);
        for (double p : {1.0, 2.0, 1.5, 3.0, 4.0 / 3.0}) {
            const double eta = 10 * rng.uniform();
            CHECK(close(k::scalar::shortfall_power_sum(x, w, eta, p), naive_shortfall(x, w, eta, p)));
            CHECK(close(k::scalar::shortfall_power_sum(x, {}, eta, p), naive_shortfall(x, {}, eta, p)));
            const auto both = k::scalar::shortfall_power_sums(x, w, eta, p, p - 1.0 > 0 ? p - 1.0 : 1.0);
            CHECK(close(both.high, naive_shortfall(x, w, eta, p)));
        }
    }
}

TEST_CASE("kernel argument checks") {
    std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS(k::max_abs_diff(a, b));
    CHECK_THROWS(k::shortfall_power_sum(a, b, 1.0, 2.0));
    CHECK_THROWS(k::shortfall_power_sum(a, {}, 1.0, 0.0));
    std::vector<double> out(1);
    CHECK_THROWS(k::row_max(a, 3, out));
}

TEST_CASE("row_max and max_abs_diff scalar reference") {
    std::vector<double> t{1, 5, 2, -1, -3, -2};
    std::vector<double> out(2);
    k::scalar::row_max(t, 3, out);
    CHECK(out == std::vector<double>{5, -1});
    std::vector<double> u{1, 5, 2, -1, -3, 0};
    CHECK(k::scalar::max_abs_diff(t, u) == 2.0);
}

TEST_CASE("backend selection") {
    BackendGuard guard;
    CHECK(k::backend_available(k::Backend::scalar));
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(k::backend_name(k::Backend::scalar) == "scalar");
    CHECK(k::backend_name(k::Backend::avx2) == "avx2");
    if (!k::backend_available(k::Backend::avx2)) CHECK_THROWS(k::set_backend(k::Backend::avx2));
}

#if defined(DRQLAB_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with scalar") {
    if (!k::backend_available(k::Backend::avx2)) {
        MESSAGE("CPU lacks AVX2; equivalence test skipped");
        return;
    }
    RngStream rng(8);
    for (std::size_t n = 0; n <= 70; ++n) {
        const auto x = random_vector(rng, n, -5, 5);
        const auto w = random_vector(rng, n, 0, 1);
        for (double p : {1.0, 2.0, 1.5, 3.0, 4.0 / 3.0}) {
            const double eta = -5 + 10 * rng.uniform();
            CHECK(close(k::avx2::shortfall_power_sum(x, w, eta, p), k::scalar::shortfall_power_sum(x, w, eta, p)));
            CHECK(close(k::avx2::shortfall_power_sum(x, {}, eta, p), k::scalar::shortfall_power_sum(x, {}, eta, p)));
            const auto s = k::scalar::shortfall_power_sums(x, w, eta, p, 1.0);
            const auto v = k::avx2::shortfall_power_sums(x, w, eta, p, 1.0);
            CHECK(close(v.high, s.high));
            CHECK(close(v.low, s.low));
        }
        const auto y = random_vector(rng, n, -5, 5);
        CHECK(k::avx2::max_abs_diff(x, y) == k::scalar::max_abs_diff(x, y));
    }
    for (std::size_t cols : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
        for (std::size_t rows : {1u, 2u, 5u, 17u}) {
            const auto t = random_vector(rng, rows * cols, -5, 5);
            std::vector<double> a(rows), b(rows);
            k::scalar::row_max(t, cols, a);
            k::avx2::row_max(t, cols, b);
            CHECK(a == b);
        }
    }
    // Sign handling: -0.0 vs 0.0 and negative differences.
    std::vector<double> p{-0.0, -3.0, 1.0, 2.0, -7.5}, q{0.0, 3.0, 1.0, 2.0, 7.5};
    CHECK(k::avx2::max_abs_diff(p, q) == 15.0);
}
#endif
