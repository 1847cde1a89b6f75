#pragma once

#include "hawkes/conditional_law.hpp"
#include "hawkes/kernel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hawkes {

enum class Mode { Linear, Rectified };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Exogenous intensities plus a D x D kernel matrix. Entry (i, j) is the
/// influence of component j on the intensity of component i.
class HawkesModel {
public:
  HawkesModel(std::vector<std::string> labels, std::vector<double> mu,
              std::vector<KernelSpec> kernels, Mode mode = Mode::Linear);

  std::size_t dimension() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& mu() const { return mu_; }
  Mode mode() const { return mode_; }

  const KernelSpec& kernel(std::size_t i, std::size_t j) const { return kernels_[i * dimension() + j]; }
  const std::vector<KernelSpec>& kernels() const { return kernels_; }

  bool operator==(const HawkesModel&) const = default;

private:
  std::vector<std::string> labels_;
  std::vector<double> mu_;
  std::vector<KernelSpec> kernels_;  // row-major
  Mode mode_;
};

/// Matrix of signed integrals of the kernels.
Eigen::MatrixXd norm_matrix(const HawkesModel& model);

/// Matrix of integrals of |phi^{ij}|.
Eigen::MatrixXd abs_norm_matrix(const HawkesModel& model);

struct SpectralRadius {
  double radius = 0.0;
  std::size_t iterations = 0;
};

/// Perron root of an entrywise nonnegative square matrix by power iteration.
/// The iteration runs on A + I, which shares the Perron vector of A and has a
/// strictly dominant eigenvalue even when A is periodic (e.g. anti-diagonal).
SpectralRadius power_iteration_radius(const Eigen::MatrixXd& nonnegative,
                                      double tolerance = 1e-10,
                                      std::size_t max_iterations = 10000);

struct StabilityReport {
  double radius = 0.0;
  bool stationary = false;
  bool conservative = false;  // radius computed on |phi| (rectified mode)
};

StabilityReport spectral_radius_check(const HawkesModel& model);

/// Lambda = (I - ||phi||)^{-1} mu.
Eigen::VectorXd expected_intensities(const HawkesModel& model);

/// Closed-form conditional law of a one-dimensional Hawkes process with
/// kernel alpha * beta * exp(-beta t):
///   g(t) = alpha beta (2 - alpha) / (2 (1 - alpha)) exp(-beta (1 - alpha) |t|).
class ExponentialClaw final : public ConditionalLaw {
public:
  ExponentialClaw(double alpha, double beta, double lambda);

  double amplitude() const { return amplitude_; }
  double decay() const { return decay_; }
  /// Integral of g over (0, inf).
  double positive_mass() const { return amplitude_ / decay_; }

  std::size_t dimension() const override { return 1; }
  double mean_intensity(std::size_t) const override { return lambda_; }
  double value(std::size_t i, std::size_t j, double lag) const override;
  SegmentIntegrals integrals(std::size_t i, std::size_t j, double lo, double hi) const override;
  double support_end() const override;

private:
  double amplitude_;
  double decay_;
  double lambda_;
};

ExponentialClaw analytic_claw_exponential(double alpha, double beta, double lambda);

}  // namespace hawkes
