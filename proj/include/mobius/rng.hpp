#pragma once

#include <cstdint>
#include <random>

#include "mobius/curve.hpp"

namespace mobius {

/// Seeded generator with explicit integer-to-double mapping so streams are
/// identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// uniform in [0, 1)
  double unit() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * unit(); }

  /// Box-Muller; deterministic given the stream position.
  double gaussian() {
    double u1 = unit(), u2 = unit();
    while (u1 <= 0) u1 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mobius
