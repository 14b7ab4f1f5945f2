// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "heightscope/types.hpp"

namespace heightscope {

// mt19937_64 with hand-written uniform and normal transforms, so a given seed
// yields the same doubles with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for a path of indices below a master seed, e.g.
  // stream(seed, {snr_index, trial}).
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t next() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n);  // uniform in [0, n)
  double normal();
  // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace heightscope
