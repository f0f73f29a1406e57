#pragma once

#include <cstdint>

namespace cellforest {

/// Counter-based generator: every output is a stateless hash of
/// (seed, stream, counter). Draws parameterized by distinct streams are
/// independent and reproducible regardless of evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    /// 53 uniform bits, the mantissa of a double in [0, 1).
    std::uint64_t next_unit_bits() { return next_u64() >> 11; }

    static double unit_from_bits(std::uint64_t bits) {
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double next_unit() { return unit_from_bits(next_unit_bits()); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cellforest
