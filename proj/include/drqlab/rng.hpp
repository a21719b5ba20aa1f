#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace drqlab {

/// Seeded random stream. Identical seeds give bit-identical variate
/// sequences on every conforming standard library (mt19937_64 output is
/// fully specified; the float conversion below does not use <random>
/// distributions, whose algorithms are implementation-defined).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    /// Independent stream derived from (seed, stream_id) via splitmix64.
    static RngStream substream(std::uint64_t seed, std::uint64_t stream_id);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        ++draws_;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); consumes exactly one variate.
    std::size_t uniform_index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draws() const { return draws_; }

    /// Raw engine access for std distributions (gamma draws in fixtures).
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace drqlab
