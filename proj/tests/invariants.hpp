#pragma once
// Property checks shared by the invariant test suite and the acceptance runner.

#include "hawkes/analytics.hpp"
#include "hawkes/claw.hpp"
#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/solver.hpp"

#include "support.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>

namespace invariant_checks {

struct Outcome {
  bool pass = false;
  std::string detail;
};

inline hawkes::HawkesModel three_component_model() {
  using hawkes::ExponentialKernel;
  using hawkes::zero_kernel;
  return hawkes::HawkesModel({"x", "y", "z"}, {0.4, 0.3, 0.2},
                             {ExponentialKernel{0.3, 2.0}, ExponentialKernel{0.2, 1.0}, zero_kernel(),
                              ExponentialKernel{0.15, 4.0}, ExponentialKernel{0.25, 1.0}, ExponentialKernel{0.1, 0.5},
                              ExponentialKernel{0.2, 0.5}, zero_kernel(), ExponentialKernel{0.35, 3.0}});
}

// Estimation chain on a simulated stream, shared by several checks.
struct Scenario {
  hawkes::HawkesModel model;
  hawkes::SimulationResult sim;
  hawkes::ConditionalLawMatrix claw;
  hawkes::KernelEstimate estimate;

  explicit Scenario(std::uint64_t seed, double horizon = 20000.0)
      : model(three_component_model()),
        sim(simulate(model, horizon, seed)),
        claw(hawkes::estimate_claw(sim.stream, hawkes::build_multiscale_grid(1e-2, 60.0, 0.1))),
        estimate(hawkes::solve_kernels(claw, hawkes::build_quadrature_grid(1e-2, 50.0, 80), {}, sim.stream.labels)) {}

private:
  static hawkes::SimulationResult simulate(const hawkes::HawkesModel& m, double horizon, std::uint64_t seed) {
    hawkes::BranchingOptions opts;
    opts.record_genealogy = true;
    return hawkes::simulate_branching(m, horizon, seed, opts);
  }
};

// Independent Poisson components: at most 2% of bins with |g| beyond 3 standard errors.
inline Outcome poisson_null(std::uint64_t seed) {
  const auto events = testing_support::poisson_stream({1.0, 0.5, 2.0}, 20000.0, seed);
  const auto c = hawkes::estimate_claw(events, hawkes::build_multiscale_grid(1e-2, 100.0, 0.1));
  std::size_t total = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t l = 0; l < c.grid().bins(); ++l) {
        ++total;
        if (std::abs(c.pair(i, j).values[l]) > 3.0 * c.standard_error(i, j, l)) ++outside;
      }
    }
  }
  const double frac = static_cast<double>(outside) / static_cast<double>(total);
  std::ostringstream d;
  d << outside << " of " << total << " bins beyond 3 SE (" << 100.0 * frac << "%, limit 2%)";
  return {frac <= 0.02, d.str()};
}

// g^{ij}(-t) == g^{ji}(t) Lambda^i / Lambda^j, compared with ==.
inline Outcome claw_symmetry(const hawkes::ConditionalLawMatrix& c) {
  const std::size_t d = c.dimension();
  std::size_t checked = 0;
  std::size_t broken = 0;
  std::vector<double> lags;
  for (double m : c.midpoints()) lags.push_back(m);
  for (std::size_t l = 0; l + 1 < c.midpoints().size(); ++l) {
    lags.push_back(0.5 * (c.midpoints()[l] + c.midpoints()[l + 1]));
  }
  lags.push_back(1e-9);
  lags.push_back(c.support_end() * 2.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (double t : lags) {
        ++checked;
        if (!(c.value(i, j, -t) == c.value(j, i, t) * (c.lambda()[i] / c.lambda()[j]))) ++broken;
      }
    }
  }
  return {broken == 0, std::to_string(broken) + " of " + std::to_string(checked) + " lags differ"};
}

// ||psi|| = ||phi|| + ||phi|| ||psi|| and (I + ||psi||)(I - ||phi||) = I.
inline Outcome psi_algebra(const Eigen::MatrixXd& norms) {
  const auto psi = hawkes::psi_norms(norms);
  const auto id = Eigen::MatrixXd::Identity(norms.rows(), norms.cols());
  const double e1 = (psi - norms - norms * psi).cwiseAbs().maxCoeff();
  const double e2 = ((id + psi) * (id - norms) - id).cwiseAbs().maxCoeff();
  std::ostringstream d;
  d << "max deviation " << std::max(e1, e2) << " (limit 1e-10)";
  return {std::max(e1, e2) <= 1e-10, d.str()};
}

inline Outcome solver_residual(const hawkes::KernelEstimate& est) {
  std::ostringstream d;
  d << "relative residual " << est.diagnostics.residual << " (limit 1e-8)";
  return {est.diagnostics.residual <= 1e-8, d.str()};
}

inline Outcome cumulated_endpoint(const hawkes::KernelEstimate& est) {
  std::size_t broken = 0;
  const auto curves = hawkes::cumulated_kernels(est);
  for (const auto& c : curves) {
    if (!(c.raw.back() == est.norm(c.target, c.source))) ++broken;
    if (!(c.normalized.back() == c.scale * est.norm(c.target, c.source))) ++broken;
  }
  return {broken == 0, std::to_string(broken) + " of " + std::to_string(2 * curves.size()) + " endpoints differ"};
}

// Type-i events descending from type-j immigrants: mean mu^j (delta_ij + ||psi^{ij}||) T,
// standard error from the spread of the per-cluster counts.
inline Outcome genealogy_conservation(const hawkes::HawkesModel& model, const hawkes::SimulationResult& sim) {
  const auto& g = *sim.genealogy;
  const std::size_t d = model.dimension();
  const double horizon = sim.stream.horizon;
  const Eigen::MatrixXd psi = hawkes::psi_norms(hawkes::norm_matrix(model));
  std::map<std::pair<std::size_t, std::uint64_t>, double> per_cluster;  // (target, cluster) -> count
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd square = Eigen::MatrixXd::Zero(d, d);
  std::size_t orphans = 0;
  std::vector<std::map<std::uint64_t, std::size_t>> cluster_type(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < g.ancestor_type[i].size(); ++k) {
      const auto a = g.ancestor_type[i][k];
      if (a < 0) {
        ++orphans;
        continue;
      }
      counts(i, a) += 1.0;
      per_cluster[{i, g.cluster[i][k]}] += 1.0;
      cluster_type[i][g.cluster[i][k]] = static_cast<std::size_t>(a);
    }
  }
  for (const auto& [key, n] : per_cluster) {
    square(key.first, cluster_type[key.first][key.second]) += n * n;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double expected = model.mu()[j] * ((i == j ? 1.0 : 0.0) + psi(i, j)) * horizon;
      // compound Poisson: Var = mu^j T E[n^2], estimated by the sum of squared cluster counts
      const double se = std::sqrt(std::max(square(i, j), expected));
      worst = std::max(worst, std::abs(counts(i, j) - expected) / se);
    }
  }
  std::ostringstream det;
  det << "largest deviation " << worst << " SE (limit 3), " << orphans << " events with mean-field ancestry";
  return {worst <= 3.0, det.str()};
}

}  // namespace invariant_checks
