#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace drqlab {

struct CurveRow {
    std::uint64_t step = 0;
    double estimate = 0.0;  // max_a Q(s0, a)
    double oracle = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t cumulative_samples = 0;
};

/// Learning curve of the start-state value; steps strictly increasing.
struct TrainingCurve {
    std::vector<CurveRow> rows;

    void record(std::uint64_t step, double estimate, std::uint64_t cumulative_samples) {
        rows.push_back({step, estimate, std::numeric_limits<double>::quiet_NaN(), cumulative_samples});
    }
    void set_oracle(double value) {
        for (auto& row : rows) row.oracle = value;
    }

    /// Samples consumed at the first row from which every later estimate
    /// stays within `tolerance` of `target`; nullopt-like sentinel (max)
    /// when the final row is outside the band.
    std::uint64_t samples_to_accuracy(double target, double tolerance) const;
};

}  // namespace drqlab
