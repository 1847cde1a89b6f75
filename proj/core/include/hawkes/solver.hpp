#pragma once

#include "hawkes/conditional_law.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace hawkes {

/// 0, T_min / n_u, ..., T_min, T_min e^delta, ..., T_max with
/// delta = (1 + ln(T_max / T_min)) / K, n_u = round(1 / delta) and
/// round(ln(T_max / T_min) / delta) log intervals, the last one ending exactly at T_max.
struct QuadratureGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t k = 0;
  double delta = 0.0;
  std::size_t uniform_intervals = 0;
  std::size_t log_intervals = 0;
  std::vector<double> points;
};

QuadratureGrid build_quadrature_grid(double t_min, double t_max, std::size_t k);

enum class Scheme { Adapted, GaussLogCV };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// Gauss-Legendre nodes and weights on [a, b], ascending nodes.
void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

struct SolverOptions {
  /// Raise Singular when the condition estimate exceeds this.
  double max_condition = 1e12;
  /// Raise Coverage instead of warning when the conditional law ends before T_max.
  bool strict_coverage = false;
  /// Worker threads for assembly; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct SolverDiagnostics {
  double condition = 0.0;     // 1-norm condition estimate of the system matrix
  double residual = 0.0;      // max |W x - g| / max(1, max |g|)
  double claw_support = 0.0;  // largest lag at which g may be nonzero
  bool covered = true;        // claw_support >= T_max
  std::vector<std::string> warnings;

  bool operator==(const SolverDiagnostics&) const = default;
};

/// Kernel values at quadrature nodes. Adapted estimates are piecewise linear
/// between nodes and zero beyond the last one; their norms are trapezoid
/// integrals. GaussLogCV norms are the quadrature sums.
struct KernelEstimate {
  std::vector<std::string> labels;
  Scheme scheme = Scheme::Adapted;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t k = 0;
  std::vector<double> nodes;
  std::vector<double> weights;           // GaussLogCV only
  std::vector<std::vector<double>> phi;  // row-major D * D, values at nodes
  std::vector<double> norms;             // row-major D * D, signed
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<bool> negative_mu;
  SolverDiagnostics diagnostics;

  std::size_t dimension() const { return labels.size(); }
  const std::vector<double>& values(std::size_t i, std::size_t j) const { return phi[i * dimension() + j]; }
  double norm(std::size_t i, std::size_t j) const { return norms[i * dimension() + j]; }
  Eigen::MatrixXd norm_matrix() const;
  /// Linear interpolation between nodes, 0 outside the node range.
  double value(std::size_t i, std::size_t j, double t) const;

  bool operator==(const KernelEstimate&) const = default;
};

/// Running integral of the estimate at every node; the last entry is the norm.
std::vector<double> cumulative_norm(const KernelEstimate& estimate, std::size_t i, std::size_t j);

struct AssembledSystem {
  Eigen::MatrixXd matrix;  // (D (N+1))^2, rows (j, n), columns (l, k)
  Eigen::MatrixXd rhs;     // (D (N+1)) x D, column i holds g^{i.}(t_n)
};

/// Piecewise-affine discretization of g^{ij} = phi^{ij} + sum_l phi^{il} * g^{lj}:
/// row (j, n), column (l, k) of the matrix multiplies phi^{il}(t_k) for every
/// target i, so column i of the solution holds row i of the kernel matrix.
AssembledSystem assemble_adapted_system(const ConditionalLaw& claw, const QuadratureGrid& grid,
                                        unsigned threads = 0);

KernelEstimate solve_kernels(const ConditionalLaw& claw, const QuadratureGrid& grid,
                             const SolverOptions& options = {}, std::vector<std::string> labels = {});

KernelEstimate solve_kernels_gauss_logcv(const ConditionalLaw& claw, std::size_t k, double t_min, double t_max,
                                         const SolverOptions& options = {}, std::vector<std::string> labels = {});

struct MuEstimate {
  std::vector<double> mu;
  std::vector<bool> negative;
};

/// mu = (I - ||phi||) Lambda, negative entries flagged, not clamped.
MuEstimate estimate_mu(const KernelEstimate& estimate);

std::string write_estimate(const KernelEstimate& estimate);
KernelEstimate read_estimate(const std::string& text);
void save_estimate(const KernelEstimate& estimate, const std::filesystem::path& path);
KernelEstimate load_estimate(const std::filesystem::path& path);

}  // namespace hawkes
