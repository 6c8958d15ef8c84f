#pragma once

#include <cstdint>
#include <random>

namespace rabinrl {

// Seeded RNG with hand-rolled distributions. std::mt19937_64 itself is
// bit-exact across platforms, but the standard distributions are not, so
// uniform draws are derived from raw engine output here.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}; rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1)
      return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  bool coin(double p) { return uniform01() < p; }

private:
  std::mt19937_64 engine_;
};

} // namespace rabinrl
