#pragma once

#include <cmath>

namespace drqlab::kernels::detail {

// d >= 0, power > 0. Integer powers 1 and 2 avoid pow() so that the common
// chi-square case (k = 2, k* = 2) is exact and vectorizable.
inline double positive_power(double d, double power) {
    if (power == 1.0) return d;
    if (power == 2.0) return d * d;
    return d > 0.0 ? std::pow(d, power) : 0.0;
}

}  // namespace drqlab::kernels::detail
