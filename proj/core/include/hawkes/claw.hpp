#pragma once

#include "hawkes/conditional_law.hpp"
#include "hawkes/event_stream.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hawkes {

/// Bin edges: round(1 / h_delta) equal steps on [0, h_min], then h_min * e^{k h_delta}
/// for k = 1..n with n = ceil(ln(h_max / h_min) / h_delta).
struct MultiscaleGrid {
  double h_min = 0.0;
  double h_max = 0.0;
  double h_delta = 0.0;
  std::size_t uniform_intervals = 0;
  std::vector<double> points;

  std::size_t bins() const { return points.empty() ? 0 : points.size() - 1; }
  double end() const { return points.back(); }
  double width(std::size_t l) const { return points[l + 1] - points[l]; }
  double midpoint(std::size_t l) const { return 0.5 * (points[l] + points[l + 1]); }
};

MultiscaleGrid build_multiscale_grid(double h_min, double h_max, double h_delta);

/// Empirical conditional laws g^{ij} on a multiscale grid.
///
/// For positive lags the law is the piecewise-linear interpolant of the bin
/// estimates placed at the bin midpoints, held constant below the first
/// midpoint and zero beyond the last one. Negative lags use
/// g^{ij}(-t) = g^{ji}(t) * Lambda^i / Lambda^j.
class ConditionalLawMatrix final : public ConditionalLaw {
public:
  struct Pair {
    std::vector<double> values;               // g-hat per bin
    std::vector<std::uint64_t> counts;        // raw pair counts per bin
    std::vector<std::uint64_t> conditioning;  // conditioning events used per bin
  };

  /// `pairs` is row-major (target-major), D * D entries.
  ConditionalLawMatrix(std::vector<std::string> labels, MultiscaleGrid grid, std::vector<double> lambda,
                       double horizon, std::vector<Pair> pairs, double resolution = 0.0);

  std::size_t dimension() const override { return labels_.size(); }
  double mean_intensity(std::size_t i) const override { return lambda_[i]; }
  double value(std::size_t i, std::size_t j, double lag) const override;
  SegmentIntegrals integrals(std::size_t i, std::size_t j, double lo, double hi) const override;
  double support_end() const override { return midpoints_.back(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const MultiscaleGrid& grid() const { return grid_; }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& midpoints() const { return midpoints_; }
  double horizon() const { return horizon_; }
  double resolution() const { return resolution_; }
  const Pair& pair(std::size_t i, std::size_t j) const { return pairs_[i * dimension() + j]; }
  const std::vector<Pair>& pairs() const { return pairs_; }

  /// Poisson-type error bar of bin l: sqrt(max(count, expected null count)) / (width * m_l).
  double standard_error(std::size_t i, std::size_t j, std::size_t l) const;
  /// False for bins whose midpoint lies below the timestamp resolution.
  bool reliable(std::size_t l) const { return midpoints_[l] >= resolution_; }

  /// Integral of (a + b u) g^{ij}(u) over [lo, hi], exact for the interpolant.
  double weighted_integral(std::size_t i, std::size_t j, double lo, double hi, double a, double b) const;

  bool operator==(const ConditionalLawMatrix& other) const;

private:
  double positive_value(std::size_t i, std::size_t j, double lag) const;
  double positive_weighted(std::size_t i, std::size_t j, double lo, double hi, double a, double b) const;

  std::vector<std::string> labels_;
  MultiscaleGrid grid_;
  std::vector<double> lambda_;
  double horizon_;
  std::vector<Pair> pairs_;
  double resolution_;
  std::vector<double> midpoints_;
};

struct ClawOptions {
  /// Timestamp resolution of the data; bins below it are flagged unreliable.
  double resolution = 0.0;
  /// Worker threads over (i, j) pairs; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Lambda^i = n_i / T.
std::vector<double> estimate_lambda(const EventStream& events);

/// Bin estimator with horizon edge correction: for bin [t_l, t_{l+1}) only
/// conditioning events T^j <= T - t_{l+1} are used.
ConditionalLawMatrix estimate_claw(const EventStream& events, const MultiscaleGrid& grid,
                                   const ClawOptions& options = {});

/// Signed-lag evaluation of the interpolated law.
double claw_eval(const ConditionalLaw& claw, std::size_t i, std::size_t j, double t);

struct ClawIntegrals {
  double i0 = 0.0;  // integral of g over [0, x]
  double i1 = 0.0;  // integral of u g(u) over [0, x]
};

/// Signed integrals from 0 to x (x < 0 integrates leftward).
ClawIntegrals claw_integrals(const ConditionalLawMatrix& claw, std::size_t i, std::size_t j, double x);

/// Schema-versioned JSON document.
std::string write_claw(const ConditionalLawMatrix& claw);
ConditionalLawMatrix read_claw(const std::string& text);
void save_claw(const ConditionalLawMatrix& claw, const std::filesystem::path& path);
ConditionalLawMatrix load_claw(const std::filesystem::path& path);

}  // namespace hawkes
