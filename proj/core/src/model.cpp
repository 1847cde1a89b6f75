#include "hawkes/model.hpp"

#include "hawkes/error.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace hawkes {

std::string to_string(Mode mode) { return mode == Mode::Linear ? "linear" : "rectified"; }

Mode parse_mode(const std::string& text) {
  if (text == "linear") return Mode::Linear;
  if (text == "rectified") return Mode::Rectified;
  fail(ErrorKind::Format, "unknown model mode '" + text + "'");
}

HawkesModel::HawkesModel(std::vector<std::string> labels, std::vector<double> mu,
                         std::vector<KernelSpec> kernels, Mode mode)
  : labels_(std::move(labels)), mu_(std::move(mu)), kernels_(std::move(kernels)), mode_(mode) {
  const std::size_t d = labels_.size();
  require(d >= 1, ErrorKind::Domain, "model dimension must be positive");
  require(std::set<std::string>(labels_.begin(), labels_.end()).size() == d, ErrorKind::Domain,
          "component labels must be unique");
  for (const auto& label : labels_) {
    require(!label.empty() && label.find_first_of(" \t\n,") == std::string::npos, ErrorKind::Domain,
            "component labels must be non-empty and contain no whitespace or commas");
  }
  require(mu_.size() == d, ErrorKind::Domain, "mu must have one entry per component");
  for (double m : mu_) {
    require(std::isfinite(m) && m >= 0.0, ErrorKind::Domain, "exogenous intensities must be >= 0");
  }
  require(kernels_.size() == d * d, ErrorKind::Domain, "kernel matrix must be D x D");
  for (const auto& k : kernels_) {
    validate_kernel(k);
    if (mode_ == Mode::Linear) {
      require(kernel_is_nonnegative(k), ErrorKind::Domain,
              "linear mode requires pointwise nonnegative kernels");
    }
  }
}

Eigen::MatrixXd norm_matrix(const HawkesModel& model) {
  const auto d = static_cast<Eigen::Index>(model.dimension());
  Eigen::MatrixXd norms(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) norms(i, j) = kernel_l1_norm(model.kernel(i, j));
  }
  return norms;
}

Eigen::MatrixXd abs_norm_matrix(const HawkesModel& model) {
  const auto d = static_cast<Eigen::Index>(model.dimension());
  Eigen::MatrixXd norms(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) norms(i, j) = kernel_abs_l1_norm(model.kernel(i, j));
  }
  return norms;
}

SpectralRadius power_iteration_radius(const Eigen::MatrixXd& a, double tolerance,
                                      std::size_t max_iterations) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::Domain, "spectral radius needs a square matrix");
  require((a.array() >= 0.0).all() && a.allFinite(), ErrorKind::Domain,
          "power iteration needs a finite, entrywise nonnegative matrix");
  const Eigen::MatrixXd shifted = a + Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows()).normalized();
  double previous = 0.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd y = shifted * x;
    const double estimate = y.norm();
    x = y / estimate;
    if (std::abs(estimate - previous) <= tolerance * std::max(1.0, estimate)) {
      return {std::max(0.0, estimate - 1.0), it};
    }
    previous = estimate;
  }
  fail(ErrorKind::NonConvergence, "power iteration did not converge in " +
                                      std::to_string(max_iterations) + " iterations");
}

StabilityReport spectral_radius_check(const HawkesModel& model) {
  StabilityReport report;
  report.conservative = model.mode() == Mode::Rectified;
  const Eigen::MatrixXd norms = report.conservative ? abs_norm_matrix(model) : norm_matrix(model);
  report.radius = power_iteration_radius(norms).radius;
  report.stationary = report.radius < 1.0;
  return report;
}

Eigen::VectorXd expected_intensities(const HawkesModel& model) {
  const Eigen::MatrixXd norms = norm_matrix(model);
  const auto d = norms.rows();
  if (model.mode() == Mode::Linear) {
    const auto check = spectral_radius_check(model);
    require(check.stationary, ErrorKind::Instability,
            "expected intensities need a stationary model (spectral radius " +
                std::to_string(check.radius) + ")");
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(d, d) - norms;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  require(lu.isInvertible(), ErrorKind::Singular, "I - ||phi|| is singular");
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) mu(i) = model.mu()[static_cast<std::size_t>(i)];
  return Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(mu);
}

// ---------------------------------------------------------------------------
// ExponentialClaw

namespace {

// h(x) = integral over [0, 1] of s exp(x s) ds
double first_moment_exp(double x) {
  if (std::abs(x) < 0.5) {
    double term = 1.0;  // x^n / n!
    double sum = 0.0;
    for (int n = 0; n < 30; ++n) {
      sum += term / (n + 2);
      term *= x / (n + 1);
    }
    return sum;
  }
  if (x > 0.0) return (std::exp(x) * (x - 1.0) + 1.0) / (x * x);
  return (1.0 - std::exp(x) * (1.0 - x)) / (x * x);
}

}  // namespace

ExponentialClaw::ExponentialClaw(double alpha, double beta, double lambda)
  : amplitude_(0.0), decay_(0.0), lambda_(lambda) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Domain, "analytic claw needs 0 < alpha < 1");
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::Domain, "analytic claw needs beta > 0");
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::Domain, "analytic claw needs Lambda > 0");
  amplitude_ = alpha * beta * (2.0 - alpha) / (2.0 * (1.0 - alpha));
  decay_ = beta * (1.0 - alpha);
}

double ExponentialClaw::value(std::size_t, std::size_t, double lag) const {
  return amplitude_ * std::exp(-decay_ * std::abs(lag));
}

ConditionalLaw::SegmentIntegrals ExponentialClaw::integrals(std::size_t, std::size_t, double lo,
                                                            double hi) const {
  SegmentIntegrals out;
  const double k = decay_;
  if (lo < 0.0) {
    // g = A exp(k u) on [lo, b]
    const double b = std::min(hi, 0.0);
    const double width = b - lo;
    const double mass = amplitude_ * std::exp(k * b) * -std::expm1(-k * width) / k;
    const double local = amplitude_ * std::exp(k * b) * width * width * first_moment_exp(-k * width);
    out.mass += mass;
    out.moment += (hi - b) * mass + local;
  }
  if (hi > 0.0) {
    // g = A exp(-k u) on [a, hi]
    const double a = std::max(lo, 0.0);
    const double width = hi - a;
    out.mass += amplitude_ * std::exp(-k * a) * -std::expm1(-k * width) / k;
    const double x = k * width;
    if (x < 0.5) {
      out.moment += amplitude_ * std::exp(-k * hi) * width * width * first_moment_exp(x);
    } else {
      out.moment += amplitude_ * (std::exp(-k * a) * (x - 1.0) + std::exp(-k * hi)) / (k * k);
    }
  }
  return out;
}

double ExponentialClaw::support_end() const { return std::numeric_limits<double>::infinity(); }

ExponentialClaw analytic_claw_exponential(double alpha, double beta, double lambda) {
  return ExponentialClaw(alpha, beta, lambda);
}

}  // namespace hawkes
