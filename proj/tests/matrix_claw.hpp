#pragma once
// Closed-form conditional laws of a linear Hawkes process whose kernels share
// one decay rate: phi(t) = beta A exp(-beta t).
//
//   psi(t) = beta A exp(-B t),  B = beta (I - A)
//   nu(t)  = psi(t) S + int_0^inf psi(t + s) S psi(s)^T ds     (t > 0, S = diag Lambda)
//          = beta A exp(-B t) (S + beta X A^T),  B X + X B^T = S
//   g(t)   = nu(t) S^{-1},  g(-t) = S g(t)^T S^{-1}

#include "hawkes/conditional_law.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <limits>

namespace testing_support {

class SharedRateClaw final : public hawkes::ConditionalLaw {
public:
  SharedRateClaw(const Eigen::MatrixXd& a, const Eigen::VectorXd& mu, double beta) : beta_(beta) {
    const auto d = a.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    lambda_ = (id - a).lu().solve(mu);
    b_ = beta * (id - a);
    b_inv_ = b_.inverse();
    const Eigen::MatrixXd s = lambda_.asDiagonal();
    // vec(B X + X B^T) = (I (x) B + B (x) I) vec(X)
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(d * d, d * d);
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index q = 0; q < d; ++q) {
        kron.block(p * d, q * d, d, d) += (p == q ? 1.0 : 0.0) * b_;
        kron.block(p * d, q * d, d, d) += b_(p, q) * id;
      }
    }
    const Eigen::VectorXd svec = Eigen::Map<const Eigen::VectorXd>(s.data(), d * d);
    const Eigen::VectorXd xvec = kron.lu().solve(svec);
    const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(xvec.data(), d, d);
    left_ = beta * a;
    right_ = (s + beta * x * a.transpose()) * s.inverse();
  }

  const Eigen::VectorXd& lambda() const { return lambda_; }

  std::size_t dimension() const override { return static_cast<std::size_t>(lambda_.size()); }
  double mean_intensity(std::size_t i) const override { return lambda_(static_cast<Eigen::Index>(i)); }

  double value(std::size_t i, std::size_t j, double lag) const override {
    if (lag >= 0.0) return positive(lag)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return positive(-lag)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * lambda_(i) / lambda_(j);
  }

  SegmentIntegrals integrals(std::size_t i, std::size_t j, double lo, double hi) const override {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    double mass = 0.0;
    double first = 0.0;  // integral of u g(u)
    if (hi > 0.0) {
      const double a = std::max(lo, 0.0);
      mass += mass_matrix(a, hi)(ii, jj);
      first += first_moment_matrix(a, hi)(ii, jj);
    }
    if (lo < 0.0) {
      const double a = std::max(-hi, 0.0);
      const double b = -lo;
      const double ratio = lambda_(ii) / lambda_(jj);
      mass += mass_matrix(a, b)(jj, ii) * ratio;
      first -= first_moment_matrix(a, b)(jj, ii) * ratio;
    }
    return {mass, hi * mass - first};
  }

  double support_end() const override { return std::numeric_limits<double>::infinity(); }

private:
  Eigen::MatrixXd expm(double t) const { return (-b_ * t).exp(); }
  Eigen::MatrixXd positive(double t) const { return left_ * expm(t) * right_; }
  // int_a^b g
  Eigen::MatrixXd mass_matrix(double a, double b) const {
    return left_ * b_inv_ * (expm(a) - expm(b)) * right_;
  }
  // int_a^b u g(u)
  Eigen::MatrixXd first_moment_matrix(double a, double b) const {
    const Eigen::MatrixXd ea = expm(a), eb = expm(b);
    return left_ * (b_inv_ * (a * ea - b * eb) + b_inv_ * b_inv_ * (ea - eb)) * right_;
  }

  double beta_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd b_inv_;
  Eigen::MatrixXd left_;
  Eigen::MatrixXd right_;
};

}  // namespace testing_support
