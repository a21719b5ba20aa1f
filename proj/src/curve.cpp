#include "drqlab/curve.hpp"

#include <cmath>

namespace drqlab {

std::uint64_t TrainingCurve::samples_to_accuracy(double target, double tolerance) const {
    std::uint64_t first = std::numeric_limits<std::uint64_t>::max();
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if (std::abs(it->estimate - target) > tolerance) break;
        first = it->cumulative_samples;
    }
    return first;
}

}  // namespace drqlab
