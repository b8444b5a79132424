#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tcmap {

// Portable seeded stream. The engine is std::mt19937_64, whose output is fixed
// by the standard; the distributions below are written out by hand because the
// std:: distributions are implementation-defined.
//
//   uniform()      = (next() >> 11) * 2^-53, in [0, 1)
//   normal(m, s)   = m + s * sqrt(-2 ln(1 - u1)) * cos(2 pi u2)  (two draws)
//   exponential(r) = -ln(1 - u) / r                              (one draw)
//   index(n)       = rejection sampling on next() for an unbiased [0, n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double stddev) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tcmap
