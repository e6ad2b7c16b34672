// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_RNG_HPP_
#define MGSA_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace mgsa {

// Deterministic RNG. mt19937_64 output is pinned by the standard; the
// derived draws below avoid std::uniform_* distributions, whose output is
// implementation-defined, so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 bits of mantissa.
  double next_unit() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // [0, bound); bound > 0. Modulo bias is irrelevant at our scales and the
  // result is fully deterministic.
  int next_int(int bound) { return static_cast<int>(gen_() % static_cast<uint64_t>(bound)); }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (int i = static_cast<int>(xs.size()) - 1; i > 0; --i) {
      int j = next_int(i + 1);
      std::swap(xs[i], xs[static_cast<size_t>(j)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64-style mix for deriving independent sub-streams from a base seed,
// e.g. per (epoch, example) dropout streams that do not depend on the worker
// that happens to run the example.
uint64_t mix_seed(uint64_t a, uint64_t b);

}  // namespace mgsa

#endif  // MGSA_RNG_HPP_
