#pragma once

#include <cstddef>

namespace hawkes {

/// Read-only view of a D x D matrix of conditional laws g^{ij}(t) defined on
/// the whole real line (negative lags included). This is what the
/// Wiener-Hopf solvers consume; it is implemented both by empirical estimates
/// and by closed-form laws used as oracles.
class ConditionalLaw {
public:
  struct SegmentIntegrals {
    double mass = 0.0;    // integral of g over [lo, hi]
    double moment = 0.0;  // integral of (hi - u) g(u) over [lo, hi]
  };

  virtual ~ConditionalLaw() = default;

  virtual std::size_t dimension() const = 0;
  /// Mean intensity Lambda^i of component i (events per second).
  virtual double mean_intensity(std::size_t i) const = 0;
  /// g^{ij}(lag), lag may be negative.
  virtual double value(std::size_t i, std::size_t j, double lag) const = 0;
  /// Exact integrals of g^{ij} over [lo, hi] (lo <= hi, any sign).
  virtual SegmentIntegrals integrals(std::size_t i, std::size_t j, double lo, double hi) const = 0;
  /// Largest |lag| at which g may be nonzero (+inf for closed forms).
  virtual double support_end() const = 0;
};

}  // namespace hawkes
