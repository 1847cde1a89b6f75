#include "hawkes/solver.hpp"

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hawkes {

using nlohmann::json;

QuadratureGrid build_quadrature_grid(double t_min, double t_max, std::size_t k) {
  require(std::isfinite(t_min) && std::isfinite(t_max) && t_min > 0.0 && t_max > t_min, ErrorKind::Domain,
          "quadrature grid needs 0 < T_min < T_max");
  require(k >= 10, ErrorKind::Domain, "quadrature grid needs K >= 10");
  QuadratureGrid grid;
  grid.t_min = t_min;
  grid.t_max = t_max;
  grid.k = k;
  const double log_ratio = std::log(t_max / t_min);
  grid.delta = (1.0 + log_ratio) / static_cast<double>(k);
  grid.uniform_intervals = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / grid.delta)));
  grid.log_intervals = static_cast<std::size_t>(std::max(1.0, std::round(log_ratio / grid.delta)));
  const double step = t_min / static_cast<double>(grid.uniform_intervals);
  for (std::size_t n = 0; n < grid.uniform_intervals; ++n) grid.points.push_back(static_cast<double>(n) * step);
  grid.points.push_back(t_min);
  for (std::size_t n = 1; n < grid.log_intervals; ++n) {
    grid.points.push_back(t_min * std::exp(static_cast<double>(n) * grid.delta));
  }
  grid.points.push_back(t_max);
  return grid;
}

std::string to_string(Scheme scheme) { return scheme == Scheme::Adapted ? "adapted" : "gauss-logcv"; }

Scheme parse_scheme(const std::string& text) {
  if (text == "adapted") return Scheme::Adapted;
  if (text == "gauss-logcv" || text == "gauss") return Scheme::GaussLogCV;
  fail(ErrorKind::Format, "unknown quadrature scheme '" + text + "'");
}

void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, ErrorKind::Domain, "Gauss-Legendre needs at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double dn = static_cast<double>(n);
  for (std::size_t r = 0; r < (n + 1) / 2; ++r) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(r) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t m = 1; m <= n; ++m) {
        const double p2 = p1;
        p1 = p0;
        const double dm = static_cast<double>(m);
        p0 = ((2.0 * dm - 1.0) * z * p1 - (dm - 1.0) * p2) / dm;
      }
      dp = dn * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[r] = mid - half * z;
    nodes[n - 1 - r] = mid + half * z;
    weights[r] = half * w;
    weights[n - 1 - r] = half * w;
  }
}

Eigen::MatrixXd KernelEstimate::norm_matrix() const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = norms[static_cast<std::size_t>(i * d + j)];
  }
  return m;
}

double KernelEstimate::value(std::size_t i, std::size_t j, double t) const {
  const auto& v = values(i, j);
  if (nodes.empty() || t < nodes.front() || t > nodes.back()) return 0.0;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  if (it == nodes.end()) return v.back();
  const auto k = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double s = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
  return v[k] + s * (v[k + 1] - v[k]);
}

std::vector<double> cumulative_norm(const KernelEstimate& estimate, std::size_t i, std::size_t j) {
  const auto& v = estimate.values(i, j);
  const auto& t = estimate.nodes;
  std::vector<double> out(t.size(), 0.0);
  double acc = 0.0;
  if (estimate.scheme == Scheme::Adapted) {
    for (std::size_t k = 1; k < t.size(); ++k) {
      acc += 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
      out[k] = acc;
    }
  } else {
    for (std::size_t k = 0; k < t.size(); ++k) {
      acc += estimate.weights[k] * v[k];
      out[k] = acc;
    }
  }
  return out;
}

MuEstimate estimate_mu(const KernelEstimate& estimate) {
  const std::size_t d = estimate.dimension();
  MuEstimate out;
  for (std::size_t i = 0; i < d; ++i) {
    double m = estimate.lambda[i];
    for (std::size_t j = 0; j < d; ++j) m -= estimate.norm(i, j) * estimate.lambda[j];
    out.mu.push_back(m);
    out.negative.push_back(m < 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly and solve

AssembledSystem assemble_adapted_system(const ConditionalLaw& claw, const QuadratureGrid& grid, unsigned threads) {
  const std::size_t d = claw.dimension();
  const auto& t = grid.points;
  const std::size_t nodes = t.size();
  const auto size = static_cast<Eigen::Index>(d * nodes);
  AssembledSystem system;
  system.matrix = Eigen::MatrixXd::Identity(size, size);
  system.rhs = Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(d));
  detail::parallel_for(d * nodes, threads, [&](std::size_t row_index) {
    const std::size_t j = row_index / nodes;
    const std::size_t n = row_index % nodes;
    const auto row = static_cast<Eigen::Index>(row_index);
    for (std::size_t i = 0; i < d; ++i) system.rhs(row, static_cast<Eigen::Index>(i)) = claw.value(i, j, t[n]);
    for (std::size_t l = 0; l < d; ++l) {
      const auto base = static_cast<Eigen::Index>(l * nodes);
      for (std::size_t k = 0; k + 1 < nodes; ++k) {
        const double width = t[k + 1] - t[k];
        const auto seg = claw.integrals(l, j, t[n] - t[k + 1], t[n] - t[k]);
        const double slope_term = seg.moment / width;
        system.matrix(row, base + static_cast<Eigen::Index>(k)) += seg.mass - slope_term;
        system.matrix(row, base + static_cast<Eigen::Index>(k + 1)) += slope_term;
      }
    }
  });
  return system;
}

namespace {

std::vector<std::string> default_labels(std::vector<std::string> labels, std::size_t d) {
  if (!labels.empty()) {
    require(labels.size() == d, ErrorKind::Domain, "one label per component");
    return labels;
  }
  for (std::size_t i = 0; i < d; ++i) labels.push_back("c" + std::to_string(i));
  return labels;
}

void check_coverage(const ConditionalLaw& claw, double t_max, const SolverOptions& options,
                    SolverDiagnostics& diag) {
  diag.claw_support = claw.support_end();
  diag.covered = diag.claw_support >= t_max;
  if (!diag.covered) {
    const std::string msg = "conditional law ends at " + format_double(diag.claw_support) +
                            " s, before T_max = " + format_double(t_max) + " s; g is taken as 0 beyond";
    require(!options.strict_coverage, ErrorKind::Coverage, msg);
    diag.warnings.push_back(msg);
  }
}

// Factors once and solves every column separately through the same LU, so that
// each column is bit-identical to an independent single right-hand-side solve.
Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& rhs,
                              const SolverOptions& options, SolverDiagnostics& diag) {
  require(matrix.allFinite() && rhs.allFinite(), ErrorKind::Singular, "assembled system has non-finite entries");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix);
  const double rcond = lu.rcond();
  diag.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  require(diag.condition <= options.max_condition, ErrorKind::Singular,
          "system is singular or ill-conditioned (condition estimate " + format_double(diag.condition) + ")");
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
    const Eigen::VectorXd column = rhs.col(j);
    x.col(j) = lu.solve(column);
  }
  const double scale = rhs.size() > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;
  const double residual = (matrix * x - rhs).cwiseAbs().maxCoeff();
  diag.residual = residual / (scale > 0.0 ? scale : 1.0);
  return x;
}

void finish_estimate(KernelEstimate& est, const ConditionalLaw& claw, const Eigen::MatrixXd& x) {
  const std::size_t d = claw.dimension();
  const std::size_t nodes = est.nodes.size();
  est.phi.assign(d * d, std::vector<double>(nodes, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t l = 0; l < d; ++l) {
      for (std::size_t k = 0; k < nodes; ++k) {
        est.phi[i * d + l][k] = x(static_cast<Eigen::Index>(l * nodes + k), static_cast<Eigen::Index>(i));
      }
    }
  }
  est.norms.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) est.norms[i * d + j] = cumulative_norm(est, i, j).back();
  }
  for (std::size_t i = 0; i < d; ++i) est.lambda.push_back(claw.mean_intensity(i));
  const auto mu = estimate_mu(est);
  est.mu = mu.mu;
  est.negative_mu = mu.negative;
  for (std::size_t i = 0; i < d; ++i) {
    if (mu.negative[i]) {
      est.diagnostics.warnings.push_back("estimated exogenous intensity of '" + est.labels[i] + "' is negative");
    }
  }
}

}  // namespace

KernelEstimate solve_kernels(const ConditionalLaw& claw, const QuadratureGrid& grid, const SolverOptions& options,
                             std::vector<std::string> labels) {
  KernelEstimate est;
  est.labels = default_labels(std::move(labels), claw.dimension());
  est.scheme = Scheme::Adapted;
  est.t_min = grid.t_min;
  est.t_max = grid.t_max;
  est.k = grid.k;
  est.nodes = grid.points;
  check_coverage(claw, grid.t_max, options, est.diagnostics);
  const auto system = assemble_adapted_system(claw, grid, options.threads);
  const Eigen::MatrixXd x = solve_columns(system.matrix, system.rhs, options, est.diagnostics);
  finish_estimate(est, claw, x);
  return est;
}

KernelEstimate solve_kernels_gauss_logcv(const ConditionalLaw& claw, std::size_t k, double t_min, double t_max,
                                         const SolverOptions& options, std::vector<std::string> labels) {
  require(std::isfinite(t_min) && std::isfinite(t_max) && t_min > 0.0 && t_max > t_min, ErrorKind::Domain,
          "Gauss quadrature needs 0 < T_min < T_max");
  require(k >= 1, ErrorKind::Domain, "Gauss quadrature needs K >= 1");
  KernelEstimate est;
  est.labels = default_labels(std::move(labels), claw.dimension());
  est.scheme = Scheme::GaussLogCV;
  est.t_min = t_min;
  est.t_max = t_max;
  est.k = k;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(k, std::log(t_min), std::log(t_max), x, w);
  for (std::size_t n = 0; n < k; ++n) {
    est.nodes.push_back(std::exp(x[n]));
    est.weights.push_back(std::exp(x[n]) * w[n]);
  }
  check_coverage(claw, t_max, options, est.diagnostics);

  const std::size_t d = claw.dimension();
  const auto size = static_cast<Eigen::Index>(d * k);
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Identity(size, size);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(d));
  const auto& t = est.nodes;
  detail::parallel_for(d * k, options.threads, [&](std::size_t row_index) {
    const std::size_t j = row_index / k;
    const std::size_t n = row_index % k;
    const auto row = static_cast<Eigen::Index>(row_index);
    for (std::size_t i = 0; i < d; ++i) rhs(row, static_cast<Eigen::Index>(i)) = claw.value(i, j, t[n]);
    for (std::size_t l = 0; l < d; ++l) {
      for (std::size_t m = 0; m < k; ++m) {
        matrix(row, static_cast<Eigen::Index>(l * k + m)) += est.weights[m] * claw.value(l, j, t[n] - t[m]);
      }
    }
  });
  const Eigen::MatrixXd solution = solve_columns(matrix, rhs, options, est.diagnostics);
  finish_estimate(est, claw, solution);
  return est;
}

// ---------------------------------------------------------------------------
// Serialization

std::string write_estimate(const KernelEstimate& est) {
  json doc;
  doc["format"] = "hawkes-kernel-estimate";
  doc["version"] = 1;
  doc["labels"] = est.labels;
  doc["scheme"] = to_string(est.scheme);
  doc["t_min"] = est.t_min;
  doc["t_max"] = est.t_max;
  doc["k"] = est.k;
  doc["nodes"] = est.nodes;
  doc["weights"] = est.weights;
  json kernels = json::array();
  const std::size_t d = est.dimension();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      kernels.push_back({{"target", est.labels[i]},
                         {"source", est.labels[j]},
                         {"norm", est.norm(i, j)},
                         {"values", est.values(i, j)}});
    }
  }
  doc["kernels"] = std::move(kernels);
  doc["lambda"] = est.lambda;
  doc["mu"] = est.mu;
  doc["negative_mu"] = est.negative_mu;
  const auto& diag = est.diagnostics;
  doc["diagnostics"] = {{"condition", diag.condition},
                        {"residual", diag.residual},
                        {"claw_support", std::isfinite(diag.claw_support) ? json(diag.claw_support) : json(nullptr)},
                        {"covered", diag.covered},
                        {"warnings", diag.warnings}};
  return doc.dump(1) + "\n";
}

KernelEstimate read_estimate(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("estimate file is not valid JSON: ") + e.what());
  }
  try {
    require(doc.value("format", std::string()) == "hawkes-kernel-estimate", ErrorKind::Format,
            "estimate file: missing format tag 'hawkes-kernel-estimate'");
    require(doc.at("version").get<int>() == 1, ErrorKind::Format, "estimate file: unsupported version");
    KernelEstimate est;
    est.labels = doc.at("labels").get<std::vector<std::string>>();
    est.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    est.t_min = doc.at("t_min").get<double>();
    est.t_max = doc.at("t_max").get<double>();
    est.k = doc.at("k").get<std::size_t>();
    est.nodes = doc.at("nodes").get<std::vector<double>>();
    est.weights = doc.at("weights").get<std::vector<double>>();
    const std::size_t d = est.labels.size();
    require(doc.at("kernels").size() == d * d, ErrorKind::Format, "estimate file: expected D x D kernels");
    est.phi.resize(d * d);
    est.norms.resize(d * d);
    for (std::size_t k = 0; k < d * d; ++k) {
      const auto& block = doc.at("kernels")[k];
      require(block.at("target").get<std::string>() == est.labels[k / d] &&
                  block.at("source").get<std::string>() == est.labels[k % d],
              ErrorKind::Format, "estimate file: kernels must be listed row-major");
      est.phi[k] = block.at("values").get<std::vector<double>>();
      est.norms[k] = block.at("norm").get<double>();
      require(est.phi[k].size() == est.nodes.size(), ErrorKind::Format, "estimate file: one value per node");
    }
    require(est.scheme == Scheme::Adapted || est.weights.size() == est.nodes.size(), ErrorKind::Format,
            "estimate file: one weight per Gauss node");
    est.lambda = doc.at("lambda").get<std::vector<double>>();
    est.mu = doc.at("mu").get<std::vector<double>>();
    est.negative_mu = doc.at("negative_mu").get<std::vector<bool>>();
    const auto& dj = doc.at("diagnostics");
    est.diagnostics.condition = dj.at("condition").get<double>();
    est.diagnostics.residual = dj.at("residual").get<double>();
    est.diagnostics.claw_support = dj.at("claw_support").is_null() ? std::numeric_limits<double>::infinity()
                                                                   : dj.at("claw_support").get<double>();
    est.diagnostics.covered = dj.at("covered").get<bool>();
    est.diagnostics.warnings = dj.at("warnings").get<std::vector<std::string>>();
    return est;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("estimate file: ") + e.what());
  }
}

void save_estimate(const KernelEstimate& estimate, const std::filesystem::path& path) {
  write_file_atomic(path, write_estimate(estimate));
}

KernelEstimate load_estimate(const std::filesystem::path& path) { return read_estimate(read_file(path)); }

}  // namespace hawkes
