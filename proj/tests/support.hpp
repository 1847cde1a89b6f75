#pragma once
// Reference computations shared by the test programs. Everything here is
// written directly from definitions, without calling the library routine it
// is used to check.

#include "hawkes/event_stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// Integral over [0, b] of a function that varies on a log scale: Simpson in
// u = ln(t + c), plus the piece [0, t0] done linearly.
inline double log_simpson(const std::function<double(double)>& f, double b, double c = 1e-6, int n = 20000) {
  const double lo = std::log(c);
  const double hi = std::log(b + c);
  return simpson([&](double u) { const double e = std::exp(u); return f(e - c) * e; }, lo, hi, n);
}

// Bin counts by direct enumeration of every (k, k') pair, with the same edge
// correction and self-pair convention as the estimator.
struct BruteBin {
  std::uint64_t count = 0;
  std::uint64_t conditioning = 0;
};

inline std::vector<BruteBin> brute_force_bins(const std::vector<double>& ti, const std::vector<double>& tj,
                                              bool self, double horizon, const std::vector<double>& grid) {
  std::vector<BruteBin> out(grid.size() - 1);
  for (std::size_t l = 0; l + 1 < grid.size(); ++l) {
    std::uint64_t m = 0;
    for (double x : tj) m += x <= horizon - grid[l + 1];
    std::uint64_t c = 0;
    for (std::uint64_t k = 0; k < m; ++k) {
      for (double y : ti) c += (y >= tj[k] + grid[l] && y < tj[k] + grid[l + 1]);
    }
    if (self && l == 0) c -= m;
    out[l] = {c, m};
  }
  return out;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = cdf(sample[k]);
    d = std::max({d, (k + 1) / n - f, f - k / n});
  }
  return d;
}

// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline hawkes::EventStream poisson_stream(const std::vector<double>& rates, double horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hawkes::EventStream s;
  s.horizon = horizon;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    s.labels.push_back("c" + std::to_string(i));
    std::vector<double> ev;
    double t = 0.0;
    while (true) {
      t += -std::log(1.0 - u(rng)) / rates[i];
      if (t >= horizon) break;
      ev.push_back(t);
    }
    s.events.push_back(std::move(ev));
  }
  return s;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hawkes_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
