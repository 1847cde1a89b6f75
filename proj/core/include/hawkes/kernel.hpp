#pragma once

#include <string>
#include <variant>
#include <vector>

namespace hawkes {

/// phi(t) = amplitude / (offset + t)^exponent for t >= 0.
struct PowerLawKernel {
  double amplitude = 0.0;
  double offset = 1.0;
  double exponent = 2.0;

  bool operator==(const PowerLawKernel&) const = default;
};

/// phi(t) = branching * rate * exp(-rate * t) for t >= 0.
struct ExponentialKernel {
  double branching = 0.0;
  double rate = 1.0;

  bool operator==(const ExponentialKernel&) const = default;
};

/// Piecewise-linear kernel through (abscissae[k], values[k]), zero outside
/// [abscissae.front(), abscissae.back()]. Values may be negative.
class TabulatedKernel {
public:
  TabulatedKernel(std::vector<double> abscissae, std::vector<double> values);

  const std::vector<double>& abscissae() const { return abscissae_; }
  const std::vector<double>& values() const { return values_; }

  double value(double t) const;
  /// Signed integral over [abscissae.front(), t].
  double cumulative(double t) const;
  double total() const { return cumulative_.back(); }
  /// sup over u >= t of max(phi(u), 0).
  double positive_envelope(double t) const;
  /// Inverse of cumulative() / total() for nonnegative tables.
  double inverse_cdf(double u) const;

  bool operator==(const TabulatedKernel& other) const {
    return abscissae_ == other.abscissae_ && values_ == other.values_;
  }

private:
  std::size_t segment(double t) const;

  std::vector<double> abscissae_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
  std::vector<double> suffix_max_;
};

using KernelSpec = std::variant<PowerLawKernel, ExponentialKernel, TabulatedKernel>;

/// A kernel that is identically zero.
KernelSpec zero_kernel();

/// Throws Domain if the parameters violate the family invariants.
void validate_kernel(const KernelSpec& spec);

std::string kernel_type_name(const KernelSpec& spec);

/// Causal evaluation: 0 for t < 0.
double kernel_eval(const KernelSpec& spec, double t);

/// Signed integral over [0, inf). Throws DivergentNorm for a power law with
/// exponent <= 1.
double kernel_l1_norm(const KernelSpec& spec);

/// Integral of |phi| over [0, inf).
double kernel_abs_l1_norm(const KernelSpec& spec);

/// Signed integral over [a, b] (b may be +inf).
double kernel_mass(const KernelSpec& spec, double a, double b);

/// Signed integral over [t, inf).
double kernel_tail_mass(const KernelSpec& spec, double t);

/// Integral of kernel_tail_mass over [a, b].
double kernel_tail_integral(const KernelSpec& spec, double a, double b);

bool kernel_is_nonnegative(const KernelSpec& spec);
bool kernel_is_zero(const KernelSpec& spec);

/// sup over u >= t of max(phi(u), 0); an upper bound for the excitation a past
/// event can contribute from lag t onwards.
double kernel_positive_envelope(const KernelSpec& spec, double t);

/// Inverse CDF of the normalised density phi / ||phi||_1 evaluated at u in
/// [0, 1). Only meaningful for nonnegative kernels with positive norm.
double kernel_sample_offset(const KernelSpec& spec, double u);

/// Smallest lag h such that the tail |mass| beyond h is below
/// relative_tail * ||phi||_1 (+inf if never reached in double range).
double kernel_truncation_horizon(const KernelSpec& spec, double relative_tail);

/// Characteristic short time scale (offset, 1/rate, or first table step).
double kernel_time_scale(const KernelSpec& spec);

/// Kernel multiplied pointwise by s.
KernelSpec scaled_kernel(const KernelSpec& spec, double s);

}  // namespace hawkes
