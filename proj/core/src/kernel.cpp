#include "hawkes/kernel.hpp"

#include "hawkes/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double power_law_primitive_tail(const PowerLawKernel& k, double t) {
  // integral over [t, inf) for exponent > 1
  return k.amplitude / (k.exponent - 1.0) * std::pow(k.offset + t, 1.0 - k.exponent);
}

}  // namespace

// ---------------------------------------------------------------------------
// TabulatedKernel

TabulatedKernel::TabulatedKernel(std::vector<double> abscissae, std::vector<double> values)
  : abscissae_(std::move(abscissae)), values_(std::move(values)) {
  require(abscissae_.size() >= 2, ErrorKind::Domain, "tabulated kernel needs at least two points");
  require(abscissae_.size() == values_.size(), ErrorKind::Domain,
          "tabulated kernel: abscissae and values differ in length");
  require(abscissae_.front() >= 0.0, ErrorKind::Domain,
          "tabulated kernel: first abscissa must be >= 0");
  for (std::size_t k = 0; k < abscissae_.size(); ++k) {
    require(std::isfinite(abscissae_[k]) && std::isfinite(values_[k]), ErrorKind::Domain,
            "tabulated kernel: non-finite entry");
    if (k > 0) {
      require(abscissae_[k] > abscissae_[k - 1], ErrorKind::Domain,
              "tabulated kernel: abscissae must be strictly increasing");
    }
  }
  const std::size_t n = abscissae_.size();
  cumulative_.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    cumulative_[k] = cumulative_[k - 1] +
                     0.5 * (abscissae_[k] - abscissae_[k - 1]) * (values_[k] + values_[k - 1]);
  }
  suffix_max_.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    running = std::max(running, values_[k]);
    suffix_max_[k] = running;
  }
}

std::size_t TabulatedKernel::segment(double t) const {
  // index a with abscissae[a] <= t < abscissae[a + 1], clamped to [0, n - 2]
  auto it = std::upper_bound(abscissae_.begin(), abscissae_.end(), t);
  std::size_t a = it == abscissae_.begin() ? 0 : static_cast<std::size_t>(it - abscissae_.begin()) - 1;
  return std::min(a, abscissae_.size() - 2);
}

double TabulatedKernel::value(double t) const {
  if (t < abscissae_.front() || t > abscissae_.back()) return 0.0;
  const std::size_t a = segment(t);
  const double x0 = abscissae_[a];
  const double x1 = abscissae_[a + 1];
  if (t == x0) return values_[a];
  return values_[a] + (t - x0) / (x1 - x0) * (values_[a + 1] - values_[a]);
}

double TabulatedKernel::cumulative(double t) const {
  if (t <= abscissae_.front()) return 0.0;
  if (t >= abscissae_.back()) return cumulative_.back();
  const std::size_t a = segment(t);
  return cumulative_[a] + 0.5 * (t - abscissae_[a]) * (values_[a] + value(t));
}

double TabulatedKernel::positive_envelope(double t) const {
  if (t > abscissae_.back()) return 0.0;
  if (t <= abscissae_.front()) return suffix_max_.front();
  const std::size_t a = segment(t);
  return std::max({0.0, value(t), suffix_max_[a + 1]});
}

double TabulatedKernel::inverse_cdf(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return abscissae_.back();
  std::size_t a = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  a = std::min(a, abscissae_.size() - 2);
  const double remaining = target - cumulative_[a];
  const double width = abscissae_[a + 1] - abscissae_[a];
  const double v0 = values_[a];
  const double slope = (values_[a + 1] - v0) / width;
  // solve v0 d + slope d^2 / 2 = remaining in the numerically stable form
  const double disc = std::max(0.0, v0 * v0 + 2.0 * slope * remaining);
  const double denom = v0 + std::sqrt(disc);
  double d = denom > 0.0 ? 2.0 * remaining / denom : 0.0;
  d = std::clamp(d, 0.0, width);
  return abscissae_[a] + d;
}

// ---------------------------------------------------------------------------

KernelSpec zero_kernel() { return ExponentialKernel{0.0, 1.0}; }

void validate_kernel(const KernelSpec& spec) {
  std::visit(overloaded{
                 [](const PowerLawKernel& k) {
                   require(std::isfinite(k.amplitude), ErrorKind::Domain, "power law: amplitude must be finite");
                   require(k.offset > 0.0 && std::isfinite(k.offset), ErrorKind::Domain,
                           "power law: offset must be > 0");
                   require(std::isfinite(k.exponent), ErrorKind::Domain, "power law: exponent must be finite");
                 },
                 [](const ExponentialKernel& k) {
                   require(std::isfinite(k.branching), ErrorKind::Domain,
                           "exponential: branching must be finite");
                   require(k.rate > 0.0 && std::isfinite(k.rate), ErrorKind::Domain,
                           "exponential: rate must be > 0");
                 },
                 [](const TabulatedKernel&) {},  // validated on construction
             },
             spec);
}

std::string kernel_type_name(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLawKernel&) { return std::string("power_law"); },
                        [](const ExponentialKernel&) { return std::string("exponential"); },
                        [](const TabulatedKernel&) { return std::string("tabulated"); },
                    },
                    spec);
}

double kernel_eval(const KernelSpec& spec, double t) {
  if (t < 0.0) return 0.0;
  return std::visit(overloaded{
                        [t](const PowerLawKernel& k) {
                          return k.amplitude / std::pow(k.offset + t, k.exponent);
                        },
                        [t](const ExponentialKernel& k) {
                          return k.branching * k.rate * std::exp(-k.rate * t);
                        },
                        [t](const TabulatedKernel& k) { return k.value(t); },
                    },
                    spec);
}

double kernel_l1_norm(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLawKernel& k) {
                          if (k.amplitude == 0.0) return 0.0;
                          require(k.exponent > 1.0, ErrorKind::DivergentNorm,
                                  "power law kernel with exponent <= 1 has a divergent L1 norm");
                          return k.amplitude * std::pow(k.offset, 1.0 - k.exponent) / (k.exponent - 1.0);
                        },
                        [](const ExponentialKernel& k) { return k.branching; },
                        [](const TabulatedKernel& k) { return k.total(); },
                    },
                    spec);
}

double kernel_abs_l1_norm(const KernelSpec& spec) {
  if (const auto* tab = std::get_if<TabulatedKernel>(&spec)) {
    const auto& x = tab->abscissae();
    const auto& v = tab->values();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double w = x[k + 1] - x[k];
      const double a = v[k];
      const double b = v[k + 1];
      if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) {
        total += 0.5 * w * std::abs(a + b);
      } else {
        // sign change inside the segment: two triangles
        total += 0.5 * w * (a * a + b * b) / (std::abs(a) + std::abs(b));
      }
    }
    return total;
  }
  return std::abs(kernel_l1_norm(spec));
}

double kernel_mass(const KernelSpec& spec, double a, double b) {
  a = std::max(a, 0.0);
  if (!(b > a)) return 0.0;
  return std::visit(overloaded{
                        [a, b](const PowerLawKernel& k) {
                          if (k.amplitude == 0.0) return 0.0;
                          if (std::isinf(b)) {
                            require(k.exponent > 1.0, ErrorKind::DivergentNorm,
                                    "power law kernel with exponent <= 1 has a divergent tail");
                            return power_law_primitive_tail(k, a);
                          }
                          if (k.exponent == 1.0) {
                            return k.amplitude * std::log((k.offset + b) / (k.offset + a));
                          }
                          const double e = 1.0 - k.exponent;
                          return k.amplitude / e * (std::pow(k.offset + b, e) - std::pow(k.offset + a, e));
                        },
                        [a, b](const ExponentialKernel& k) {
                          const double upper = std::isinf(b) ? 0.0 : std::exp(-k.rate * b);
                          return k.branching * (std::exp(-k.rate * a) - upper);
                        },
                        [a, b](const TabulatedKernel& k) { return k.cumulative(b) - k.cumulative(a); },
                    },
                    spec);
}

double kernel_tail_mass(const KernelSpec& spec, double t) { return kernel_mass(spec, t, kInf); }

double kernel_tail_integral(const KernelSpec& spec, double a, double b) {
  a = std::max(a, 0.0);
  if (!(b > a)) return 0.0;
  return std::visit(
      overloaded{
          [a, b](const PowerLawKernel& k) {
            if (k.amplitude == 0.0) return 0.0;
            require(k.exponent > 1.0, ErrorKind::DivergentNorm,
                    "power law kernel with exponent <= 1 has a divergent tail");
            const double scale = k.amplitude / (k.exponent - 1.0);
            const double e = 2.0 - k.exponent;
            if (std::isinf(b)) {
              if (e >= 0.0) return kInf;
              return scale / (-e) * std::pow(k.offset + a, e);
            }
            if (e == 0.0) return scale * std::log((k.offset + b) / (k.offset + a));
            return scale / e * (std::pow(k.offset + b, e) - std::pow(k.offset + a, e));
          },
          [a, b](const ExponentialKernel& k) {
            const double upper = std::isinf(b) ? 0.0 : std::exp(-k.rate * b);
            return k.branching / k.rate * (std::exp(-k.rate * a) - upper);
          },
          [a, b](const TabulatedKernel& k) {
            // tail mass is piecewise quadratic between table points: Simpson is exact
            auto tail = [&k](double s) { return k.total() - k.cumulative(s); };
            std::vector<double> cuts{a};
            for (double x : k.abscissae()) {
              if (x > a && x < b) cuts.push_back(x);
            }
            const double end = std::min(b, k.abscissae().back());
            if (end > a) cuts.push_back(end);
            double total = 0.0;
            for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
              const double lo = cuts[m];
              const double hi = cuts[m + 1];
              total += (hi - lo) / 6.0 * (tail(lo) + 4.0 * tail(0.5 * (lo + hi)) + tail(hi));
            }
            return total;
          },
      },
      spec);
}

bool kernel_is_nonnegative(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLawKernel& k) { return k.amplitude >= 0.0; },
                        [](const ExponentialKernel& k) { return k.branching >= 0.0; },
                        [](const TabulatedKernel& k) {
                          return std::all_of(k.values().begin(), k.values().end(),
                                             [](double v) { return v >= 0.0; });
                        },
                    },
                    spec);
}

bool kernel_is_zero(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLawKernel& k) { return k.amplitude == 0.0; },
                        [](const ExponentialKernel& k) { return k.branching == 0.0; },
                        [](const TabulatedKernel& k) {
                          return std::all_of(k.values().begin(), k.values().end(),
                                             [](double v) { return v == 0.0; });
                        },
                    },
                    spec);
}

double kernel_positive_envelope(const KernelSpec& spec, double t) {
  t = std::max(t, 0.0);
  if (const auto* tab = std::get_if<TabulatedKernel>(&spec)) return tab->positive_envelope(t);
  // power law and exponential are monotone in |phi|
  return std::max(0.0, kernel_eval(spec, t));
}

double kernel_sample_offset(const KernelSpec& spec, double u) {
  return std::visit(overloaded{
                        [u](const PowerLawKernel& k) {
                          return k.offset * (std::pow(1.0 - u, -1.0 / (k.exponent - 1.0)) - 1.0);
                        },
                        [u](const ExponentialKernel& k) { return -std::log1p(-u) / k.rate; },
                        [u](const TabulatedKernel& k) { return k.inverse_cdf(u); },
                    },
                    spec);
}

double kernel_truncation_horizon(const KernelSpec& spec, double relative_tail) {
  if (kernel_is_zero(spec)) return 0.0;
  return std::visit(overloaded{
                        [relative_tail](const PowerLawKernel& k) {
                          if (k.exponent <= 1.0) return kInf;
                          const double h = k.offset * (std::pow(relative_tail, -1.0 / (k.exponent - 1.0)) - 1.0);
                          return std::isfinite(h) ? h : kInf;
                        },
                        [relative_tail](const ExponentialKernel& k) { return -std::log(relative_tail) / k.rate; },
                        [](const TabulatedKernel& k) { return k.abscissae().back(); },
                    },
                    spec);
}

double kernel_time_scale(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLawKernel& k) { return k.offset; },
                        [](const ExponentialKernel& k) { return 1.0 / k.rate; },
                        [](const TabulatedKernel& k) { return k.abscissae()[1] - k.abscissae()[0]; },
                    },
                    spec);
}

KernelSpec scaled_kernel(const KernelSpec& spec, double s) {
  return std::visit(overloaded{
                        [s](const PowerLawKernel& k) -> KernelSpec {
                          return PowerLawKernel{k.amplitude * s, k.offset, k.exponent};
                        },
                        [s](const ExponentialKernel& k) -> KernelSpec {
                          return ExponentialKernel{k.branching * s, k.rate};
                        },
                        [s](const TabulatedKernel& k) -> KernelSpec {
                          std::vector<double> v = k.values();
                          for (double& x : v) x *= s;
                          return TabulatedKernel(k.abscissae(), std::move(v));
                        },
                    },
                    spec);
}

}  // namespace hawkes
