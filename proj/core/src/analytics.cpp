#include "hawkes/analytics.hpp"

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hawkes {

using nlohmann::json;

double spectral_radius(const Eigen::MatrixXd& matrix) {
  require(matrix.rows() == matrix.cols() && matrix.rows() > 0, ErrorKind::Domain, "square matrix required");
  if (!matrix.allFinite()) return std::numeric_limits<double>::infinity();
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd psi_norms(const Eigen::MatrixXd& norms) {
  const double radius = spectral_radius(norms);
  require(radius < 1.0, ErrorKind::Instability,
          "psi norms need spectral radius < 1 (got " + format_double(radius) + ")");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(norms.rows(), norms.cols());
  return Eigen::PartialPivLU<Eigen::MatrixXd>(id - norms).solve(norms);
}

std::vector<double> exogeneity_ratios(const std::vector<double>& mu, const std::vector<double>& lambda) {
  require(mu.size() == lambda.size(), ErrorKind::Domain, "mu and Lambda sizes differ");
  std::vector<double> r;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(lambda[i] > 0.0, ErrorKind::Domain, "exogeneity ratio needs Lambda > 0");
    r.push_back(mu[i] / lambda[i]);
  }
  return r;
}

Eigen::MatrixXd dressed_fractions(const Eigen::MatrixXd& psi, const std::vector<double>& mu,
                                  const std::vector<double>& lambda) {
  const auto d = psi.rows();
  require(psi.cols() == d && static_cast<Eigen::Index>(mu.size()) == d &&
              static_cast<Eigen::Index>(lambda.size()) == d,
          ErrorKind::Domain, "dressed fractions: dimension mismatch");
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    require(lambda[static_cast<std::size_t>(i)] > 0.0, ErrorKind::Domain, "dressed fractions need Lambda > 0");
    for (Eigen::Index j = 0; j < d; ++j) {
      out(i, j) = mu[static_cast<std::size_t>(j)] / lambda[static_cast<std::size_t>(i)] * psi(i, j);
    }
  }
  return out;
}

std::vector<CumulatedCurve> cumulated_kernels(const KernelEstimate& estimate) {
  const std::size_t d = estimate.dimension();
  std::vector<CumulatedCurve> curves;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      CumulatedCurve c;
      c.target = i;
      c.source = j;
      c.scale = estimate.lambda[i] > 0.0 ? estimate.lambda[j] / estimate.lambda[i] : 0.0;
      c.raw = cumulative_norm(estimate, i, j);
      c.normalized.reserve(c.raw.size());
      for (double v : c.raw) c.normalized.push_back(c.scale * v);
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

// ---------------------------------------------------------------------------
// Pairings

void validate_pairing(const Pairing& pairing, std::size_t d) {
  require(pairing.size() == d, ErrorKind::Pairing, "pairing must list every component");
  for (std::size_t i = 0; i < d; ++i) {
    require(pairing[i] < d, ErrorKind::Pairing, "pairing maps outside the components");
    require(pairing[pairing[i]] == i, ErrorKind::Pairing, "pairing must be an involution");
  }
}

Pairing parse_pairing(const std::string& text, const std::vector<std::string>& labels) {
  Pairing pairing(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) pairing[i] = i;
  std::vector<bool> assigned(labels.size(), false);
  auto index_of = [&labels](std::string label) {
    const auto first = label.find_first_not_of(" \t");
    label = first == std::string::npos ? std::string() : label.substr(first, label.find_last_not_of(" \t") - first + 1);
    const auto it = std::find(labels.begin(), labels.end(), label);
    require(it != labels.end(), ErrorKind::Pairing, "pairing names unknown component '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.find(':');
    require(colon != std::string::npos, ErrorKind::Pairing, "pairing entries look like 'a:b'");
    const std::size_t a = index_of(item.substr(0, colon));
    const std::size_t b = index_of(item.substr(colon + 1));
    require(!assigned[a] && !assigned[b], ErrorKind::Pairing, "component paired twice");
    assigned[a] = assigned[b] = true;
    pairing[a] = b;
    pairing[b] = a;
  }
  validate_pairing(pairing, labels.size());
  return pairing;
}

const std::vector<std::string>& book_labels() {
  static const std::vector<std::string> labels{"P_a", "P_b", "T_a", "T_b", "L_a", "L_b", "C_a", "C_b"};
  return labels;
}

Pairing book_pairing() { return {1, 0, 3, 2, 5, 4, 7, 6}; }

// ---------------------------------------------------------------------------
// Symmetry

namespace {

// integral of |f| for f linear on a segment of width w with end values a, b
double abs_linear(double w, double a, double b) {
  if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) return 0.5 * w * std::abs(a + b);
  return 0.5 * w * (a * a + b * b) / (std::abs(a) + std::abs(b));
}

double abs_integral(const KernelEstimate& est, const std::vector<double>& a, const std::vector<double>* b) {
  auto diff = [&](std::size_t k) { return b ? a[k] - (*b)[k] : a[k]; };
  double total = 0.0;
  if (est.scheme == Scheme::Adapted) {
    for (std::size_t k = 1; k < est.nodes.size(); ++k) {
      total += abs_linear(est.nodes[k] - est.nodes[k - 1], diff(k - 1), diff(k));
    }
  } else {
    for (std::size_t k = 0; k < est.nodes.size(); ++k) total += est.weights[k] * std::abs(diff(k));
  }
  return total;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double l1_distance(const KernelEstimate& estimate, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  return abs_integral(estimate, estimate.values(i, j), &estimate.values(k, l));
}

double l1_magnitude(const KernelEstimate& estimate, std::size_t i, std::size_t j) {
  return abs_integral(estimate, estimate.values(i, j), nullptr);
}

SymmetryReport symmetry_report(const KernelEstimate& estimate, const Pairing& pairing,
                               const SymmetryOptions& options) {
  const std::size_t d = estimate.dimension();
  validate_pairing(pairing, d);
  require(options.floor >= 0.0 && options.threshold >= 0.0, ErrorKind::Domain,
          "symmetry threshold and floor must be >= 0");
  SymmetryReport report;
  report.threshold = options.threshold;
  std::vector<double> l1;
  std::vector<double> norms;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t mi = pairing[i];
      const std::size_t mj = pairing[j];
      // each unordered pair once; kernels mapped onto themselves carry no information
      if (mi * d + mj <= i * d + j) continue;
      SymmetryEntry e;
      e.target = i;
      e.source = j;
      e.mirror_target = mi;
      e.mirror_source = mj;
      const double mag = 0.5 * (l1_magnitude(estimate, i, j) + l1_magnitude(estimate, mi, mj));
      e.l1_deviation = l1_distance(estimate, i, j, mi, mj) / std::max({mag, options.floor, 1e-300});
      const double a = estimate.norm(i, j);
      const double b = estimate.norm(mi, mj);
      const double scale = 0.5 * (std::abs(a) + std::abs(b));
      e.norm_deviation = std::abs(a - b) / std::max({scale, options.floor, 1e-300});
      e.flagged = e.l1_deviation > options.threshold || e.norm_deviation > options.threshold;
      l1.push_back(e.l1_deviation);
      norms.push_back(e.norm_deviation);
      report.entries.push_back(e);
    }
  }
  report.median_l1 = median(l1);
  report.median_norm = median(norms);
  return report;
}

// ---------------------------------------------------------------------------
// Report

CausalityReport analyze(const KernelEstimate& estimate, const std::optional<Pairing>& pairing,
                        const SymmetryOptions& symmetry) {
  CausalityReport r;
  r.labels = estimate.labels;
  r.norm_matrix = estimate.norm_matrix();
  r.radius = spectral_radius(r.norm_matrix);
  r.mu = estimate.mu;
  r.lambda = estimate.lambda;
  r.exo_ratios = exogeneity_ratios(r.mu, r.lambda);
  if (r.radius < 1.0) {
    r.psi_norms = psi_norms(r.norm_matrix);
    r.dressed_fractions = dressed_fractions(r.psi_norms, r.mu, r.lambda);
  } else {
    r.warnings.push_back("estimated norm matrix has spectral radius " + format_double(r.radius) +
                         " >= 1; psi norms and dressed fractions omitted");
  }
  r.nodes = estimate.nodes;
  r.cumulated = cumulated_kernels(estimate);
  if (pairing) r.symmetry = symmetry_report(estimate, *pairing, symmetry);
  for (const auto& w : estimate.diagnostics.warnings) r.warnings.push_back(w);
  return r;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string write_report(const CausalityReport& r) {
  json doc;
  doc["format"] = "hawkes-report";
  doc["version"] = 1;
  doc["labels"] = r.labels;
  doc["norm_matrix"] = matrix_json(r.norm_matrix);
  doc["spectral_radius"] = r.radius;
  doc["psi_norms"] = r.psi_norms.size() > 0 ? matrix_json(r.psi_norms) : json(nullptr);
  doc["dressed_fractions"] = r.dressed_fractions.size() > 0 ? matrix_json(r.dressed_fractions) : json(nullptr);
  doc["mu"] = r.mu;
  doc["lambda"] = r.lambda;
  doc["exogeneity_ratios"] = r.exo_ratios;
  json curves = json::array();
  for (const auto& c : r.cumulated) {
    curves.push_back({{"target", r.labels[c.target]},
                      {"source", r.labels[c.source]},
                      {"scale", c.scale},
                      {"normalized", c.normalized}});
  }
  doc["cumulated"] = {{"nodes", r.nodes}, {"curves", std::move(curves)}};
  if (r.symmetry) {
    json entries = json::array();
    for (const auto& e : r.symmetry->entries) {
      entries.push_back({{"kernel", r.labels[e.source] + "->" + r.labels[e.target]},
                         {"mirror", r.labels[e.mirror_source] + "->" + r.labels[e.mirror_target]},
                         {"l1_deviation", e.l1_deviation},
                         {"norm_deviation", e.norm_deviation},
                         {"flagged", e.flagged}});
    }
    doc["symmetry"] = {{"threshold", r.symmetry->threshold},
                       {"median_l1_deviation", r.symmetry->median_l1},
                       {"median_norm_deviation", r.symmetry->median_norm},
                       {"entries", std::move(entries)}};
  }
  doc["warnings"] = r.warnings;
  return doc.dump(1) + "\n";
}

namespace {

void print_matrix(std::ostream& out, const std::string& title, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& labels) {
  out << title << " (row: target, column: source)\n";
  out << std::setw(8) << "";
  for (const auto& l : labels) out << std::setw(11) << l;
  out << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << std::setw(8) << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << std::setw(11) << std::setprecision(4) << m(i, j);
    out << "\n";
  }
  out << "\n";
}

}  // namespace

std::string format_tables(const CausalityReport& r) {
  std::ostringstream out;
  out << std::setw(8) << "";
  for (const auto& l : r.labels) out << std::setw(11) << l;
  out << "\n" << std::setw(8) << "mu";
  for (double m : r.mu) out << std::setw(11) << std::setprecision(3) << std::scientific << m;
  out << std::defaultfloat << "\n" << std::setw(8) << "Lambda";
  for (double l : r.lambda) out << std::setw(11) << std::setprecision(3) << std::scientific << l;
  out << std::defaultfloat << "\n" << std::setw(8) << "R";
  for (double x : r.exo_ratios) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(1) << 100.0 * x << "%";
    out << std::setw(11) << cell.str();
  }
  out << "\n\n";
  print_matrix(out, "||phi||", r.norm_matrix, r.labels);
  if (r.psi_norms.size() > 0) {
    print_matrix(out, "||psi||", r.psi_norms, r.labels);
    print_matrix(out, "||psibar||", r.dressed_fractions, r.labels);
  }
  if (r.symmetry) {
    out << "symmetry: median relative L1 deviation " << r.symmetry->median_l1 << ", median norm deviation "
        << r.symmetry->median_norm << "\n";
    for (const auto& e : r.symmetry->entries) {
      if (!e.flagged) continue;
      out << "  flagged " << r.labels[e.source] << "->" << r.labels[e.target] << " vs "
          << r.labels[e.mirror_source] << "->" << r.labels[e.mirror_target] << ": L1 " << e.l1_deviation
          << ", norm " << e.norm_deviation << "\n";
    }
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string matrix_tsv(const Eigen::MatrixXd& matrix, const std::vector<std::string>& labels) {
  std::string out = "target";
  for (const auto& l : labels) out += "\t" + l;
  out += "\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out += labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out += "\t" + format_double(matrix(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace hawkes
