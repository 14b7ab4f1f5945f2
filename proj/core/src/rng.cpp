// SPDX-License-Identifier: Apache-2.0
#include "heightscope/rng.hpp"

#include <cmath>

namespace heightscope {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw DomainError("index range is empty");
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return rad * std::cos(kTwoPi * u2);
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

}  // namespace heightscope
