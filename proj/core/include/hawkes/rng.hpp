#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hawkes {

/// Seeded generator with hand-written samplers. std::mt19937_64 output is
/// fixed by the standard; the distributions below are written out so that a
/// seed reproduces the same stream on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_open_low()) / rate; }

  /// Poisson by inversion; intended for the moderate means of offspring counts.
  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean > 30.0) return poisson_by_arrivals(mean);
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  std::uint64_t next() { return engine_(); }

private:
  std::uint64_t poisson_by_arrivals(double mean) {
    std::uint64_t k = 0;
    double t = exponential(1.0);
    while (t < mean) {
      ++k;
      t += exponential(1.0);
    }
    return k;
  }

  std::mt19937_64 engine_;
};

}  // namespace hawkes
