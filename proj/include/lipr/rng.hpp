// SPDX-License-Identifier: Apache-2.0

#ifndef LIPR_RNG_HPP
#define LIPR_RNG_HPP

#include <cstdint>
#include <random>

namespace lipr {

// Seeded generator with an explicit uniform mapping. std::uniform_real_distribution
// is implementation-defined, so draws go through the 53-bit ladder directly to
// keep streams identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }
  std::uint64_t next_u64() { return gen_(); }
  // Uniform integer in [0, n) by rejection; exact, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lipr

#endif  // LIPR_RNG_HPP
