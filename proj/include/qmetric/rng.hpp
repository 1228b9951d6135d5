#pragma once

#include <cmath>
#include <cstdint>

#include "qmetric/types.hpp"

namespace qmetric {

// Deterministic generator with a fully specified algorithm, so that seeded
// artifacts are reproducible independent of the standard library build.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Standard complex Gaussian via Box-Muller.
  Complex gaussian() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    return {r * std::cos(2.0 * M_PI * v), r * std::sin(2.0 * M_PI * v)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace qmetric
