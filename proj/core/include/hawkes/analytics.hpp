#pragma once

#include "hawkes/solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace hawkes {

/// ||psi|| = ||phi|| (I - ||phi||)^{-1}. Throws Instability when the spectral
/// radius of the (signed) norm matrix is >= 1.
Eigen::MatrixXd psi_norms(const Eigen::MatrixXd& norms);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& matrix);

/// R^i = mu^i / Lambda^i.
std::vector<double> exogeneity_ratios(const std::vector<double>& mu, const std::vector<double>& lambda);

/// psibar^{ij} = (mu^j / Lambda^i) ||psi^{ij}||: fraction of type-i events whose
/// exogenous ancestor is of type j.
Eigen::MatrixXd dressed_fractions(const Eigen::MatrixXd& psi, const std::vector<double>& mu,
                                  const std::vector<double>& lambda);

struct CumulatedCurve {
  std::size_t target = 0;
  std::size_t source = 0;
  double scale = 1.0;               // Lambda^j / Lambda^i
  std::vector<double> raw;          // integral over [0, t_k] of the estimate
  std::vector<double> normalized;   // scale * raw
};

/// One curve per (i, j), row-major, sampled at the estimate nodes.
std::vector<CumulatedCurve> cumulated_kernels(const KernelEstimate& estimate);

/// Involution on components given as an index permutation.
using Pairing = std::vector<std::size_t>;

/// Throws Pairing unless `pairing` is a bijection of {0..d-1} onto itself that is its own inverse.
void validate_pairing(const Pairing& pairing, std::size_t d);

/// Parses "a:b,c:d" against labels; unlisted components map to themselves.
Pairing parse_pairing(const std::string& text, const std::vector<std::string>& labels);

/// Level-I book taxonomy and its ask/bid swap.
const std::vector<std::string>& book_labels();
Pairing book_pairing();

struct SymmetryEntry {
  std::size_t target = 0;
  std::size_t source = 0;
  std::size_t mirror_target = 0;
  std::size_t mirror_source = 0;
  double l1_deviation = 0.0;    // relative L1 distance of the two estimates
  double norm_deviation = 0.0;  // relative difference of the signed norms
  bool flagged = false;
};

struct SymmetryOptions {
  /// Entries with either deviation above this are flagged.
  double threshold = 0.1;
  /// Lower bound of the normalising scale, in norm units; keeps kernels that
  /// are zero on both sides from producing noise-dominated ratios.
  double floor = 0.05;
};

struct SymmetryReport {
  std::vector<SymmetryEntry> entries;
  double median_l1 = 0.0;
  double median_norm = 0.0;
  double threshold = 0.0;
};

SymmetryReport symmetry_report(const KernelEstimate& estimate, const Pairing& pairing,
                               const SymmetryOptions& options = {});

/// Integral of |phi^{ij} - phi^{kl}| (exact for piecewise-linear estimates).
double l1_distance(const KernelEstimate& estimate, std::size_t i, std::size_t j, std::size_t k, std::size_t l);
/// Integral of |phi^{ij}|.
double l1_magnitude(const KernelEstimate& estimate, std::size_t i, std::size_t j);

struct CausalityReport {
  std::vector<std::string> labels;
  Eigen::MatrixXd norm_matrix;
  double radius = 0.0;
  Eigen::MatrixXd psi_norms;
  Eigen::MatrixXd dressed_fractions;
  std::vector<double> mu;
  std::vector<double> lambda;
  std::vector<double> exo_ratios;
  std::vector<double> nodes;
  std::vector<CumulatedCurve> cumulated;
  std::optional<SymmetryReport> symmetry;
  std::vector<std::string> warnings;
};

/// psi and dressed fractions are left empty (with a warning) when the
/// estimated norm matrix has spectral radius >= 1.
CausalityReport analyze(const KernelEstimate& estimate, const std::optional<Pairing>& pairing = std::nullopt,
                        const SymmetryOptions& symmetry = {});

std::string write_report(const CausalityReport& report);

/// Human-readable tables: mu row, R row (percent), norm matrices.
std::string format_tables(const CausalityReport& report);

/// Heat-map data: header of source labels, one row per target label.
std::string matrix_tsv(const Eigen::MatrixXd& matrix, const std::vector<std::string>& labels);

}  // namespace hawkes
