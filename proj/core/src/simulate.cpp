#include "hawkes/simulate.hpp"

#include "hawkes/error.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KernelTable {
  std::size_t d = 0;
  std::vector<double> norms;     // signed, row-major
  std::vector<bool> active;      // kernel not identically zero
  double min_scale = kInf;
  double max_scale = 0.0;
};

KernelTable tabulate(const HawkesModel& model) {
  KernelTable table;
  table.d = model.dimension();
  for (std::size_t i = 0; i < table.d; ++i) {
    for (std::size_t j = 0; j < table.d; ++j) {
      const auto& k = model.kernel(i, j);
      const bool active = !kernel_is_zero(k);
      table.active.push_back(active);
      table.norms.push_back(active ? kernel_l1_norm(k) : 0.0);
      if (active) {
        table.min_scale = std::min(table.min_scale, kernel_time_scale(k));
        table.max_scale = std::max(table.max_scale, kernel_time_scale(k));
      }
    }
  }
  return table;
}

// Lambda for the first-order bookkeeping, or empty when it is not defined.
std::vector<double> stationary_lambda(const HawkesModel& model) {
  const Eigen::MatrixXd norms = model.mode() == Mode::Linear ? norm_matrix(model) : abs_norm_matrix(model);
  if (power_iteration_radius(norms).radius >= 1.0) return {};
  const auto d = norms.rows();
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) mu(i) = model.mu()[static_cast<std::size_t>(i)];
  const Eigen::VectorXd lambda =
      Eigen::PartialPivLU<Eigen::MatrixXd>(Eigen::MatrixXd::Identity(d, d) - norms).solve(mu);
  return {lambda.data(), lambda.data() + d};
}

// Sorts one component (carrying genealogy along) and restores strict order.
void finalize_component(std::vector<double>& times, Genealogy* genealogy, std::size_t component,
                        std::size_t& jittered) {
  if (genealogy == nullptr) {
    jittered += enforce_strict_order(times);
    return;
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  auto permute = [&order](auto& values) {
    auto copy = values;
    for (std::size_t k = 0; k < order.size(); ++k) values[k] = copy[order[k]];
  };
  permute(times);
  permute(genealogy->ancestor_type[component]);
  permute(genealogy->immigrant[component]);
  permute(genealogy->cluster[component]);
  jittered += enforce_strict_order(times);
}

}  // namespace

double choose_warmup(const HawkesModel& model, double horizon, double max_warmup, bool* capped) {
  if (capped) *capped = false;
  const auto table = tabulate(model);
  const std::size_t d = table.d;
  if (std::none_of(table.active.begin(), table.active.end(), [](bool a) { return a; })) return 0.0;
  const auto lambda = stationary_lambda(model);
  if (lambda.empty()) {
    if (capped) *capped = true;
    return max_warmup;
  }
  const Eigen::MatrixXd norms = model.mode() == Mode::Linear ? norm_matrix(model) : abs_norm_matrix(model);
  const Eigen::PartialPivLU<Eigen::MatrixXd> resolvent(Eigen::MatrixXd::Identity(norms.rows(), norms.cols()) -
                                                       norms);
  auto expected_late_descendants = [&](double w) {
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (!table.active[i * d + j]) continue;
        const double tail = kernel_tail_integral(model.kernel(i, j), w, w + horizon);
        direct(static_cast<Eigen::Index>(i)) += lambda[j] * std::abs(tail);
      }
    }
    return resolvent.solve(direct).sum();
  };
  double w = std::min(max_warmup, 10.0 * table.max_scale);
  while (true) {
    if (expected_late_descendants(w) < 1.0) return w;
    if (w >= max_warmup) break;
    w = std::min(max_warmup, 2.0 * w);
  }
  if (capped) *capped = true;
  return max_warmup;
}

// ---------------------------------------------------------------------------
// Branching construction

SimulationResult simulate_branching(const HawkesModel& model, double horizon, std::uint64_t seed,
                                    const BranchingOptions& options) {
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::Domain, "simulation horizon must be > 0");
  require(model.mode() == Mode::Linear, ErrorKind::Domain,
          "branching simulation needs a linear model; use thinning for rectified models");
  const auto stability = spectral_radius_check(model);
  require(stability.stationary, ErrorKind::Instability,
          "branching simulation needs spectral radius < 1 (got " + std::to_string(stability.radius) + ")");

  const auto table = tabulate(model);
  const std::size_t d = table.d;
  SimulationResult result;
  auto& diag = result.diagnostics;
  diag.radius = stability.radius;
  diag.stationary = stability.stationary;
  bool capped = false;
  const double warmup = choose_warmup(model, horizon, options.max_warmup, &capped);
  diag.warmup = warmup;
  if (capped) {
    diag.warnings.push_back("burn-in capped at " + std::to_string(options.max_warmup) +
                            " s; long-memory kernels may not have reached stationarity");
  }

  Rng rng(seed);
  std::vector<std::vector<double>> times(d);
  Genealogy genealogy;
  Genealogy* record = options.record_genealogy ? &genealogy : nullptr;
  if (record) {
    genealogy.ancestor_type.resize(d);
    genealogy.immigrant.resize(d);
    genealogy.cluster.resize(d);
  }

  struct Pending {
    double time;
    std::uint32_t type;
    std::int32_t root_type;
    std::uint64_t cluster;
    bool immigrant;
  };
  std::vector<Pending> stack;
  std::uint64_t next_cluster = 0;

  auto run_cluster = [&](Pending root) {
    stack.clear();
    stack.push_back(root);
    while (!stack.empty()) {
      const Pending e = stack.back();
      stack.pop_back();
      ++diag.generated;
      if (e.time >= 0.0) {
        times[e.type].push_back(e.time);
        if (record) {
          genealogy.ancestor_type[e.type].push_back(e.root_type);
          genealogy.immigrant[e.type].push_back(e.immigrant ? 1 : 0);
          genealogy.cluster[e.type].push_back(e.cluster);
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t idx = i * d + e.type;
        if (!table.active[idx]) continue;
        const auto children = rng.poisson(table.norms[idx]);
        for (std::uint64_t c = 0; c < children; ++c) {
          const double t = e.time + kernel_sample_offset(model.kernel(i, e.type), rng.uniform());
          if (t < horizon) {
            stack.push_back({t, static_cast<std::uint32_t>(i), e.root_type, e.cluster, false});
          }
        }
      }
    }
  };

  // immigrants on [-W, T)
  for (std::size_t i = 0; i < d; ++i) {
    const double rate = model.mu()[i];
    if (!(rate > 0.0)) continue;
    double t = -warmup + rng.exponential(rate);
    while (t < horizon) {
      run_cluster({t, static_cast<std::uint32_t>(i), static_cast<std::int32_t>(i), next_cluster++, true});
      t += rng.exponential(rate);
    }
  }

  // mean-field replacement of the history before -W
  if (options.ancient_history && warmup > 0.0) {
    const auto lambda = stationary_lambda(model);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (!table.active[i * d + j]) continue;
        const auto& kernel = model.kernel(i, j);
        // intensity lambda_j * tail(e) on elapsed time e = t + W in [0, W + T)
        const double end = warmup + horizon;
        double block_start = 0.0;
        double block_end = std::min(end, table.min_scale);
        while (block_start < end) {
          const double bound = lambda[j] * kernel_tail_mass(kernel, block_start);
          if (bound > 0.0) {
            double e = block_start + rng.exponential(bound);
            while (e < block_end) {
              if (rng.uniform() * bound < lambda[j] * kernel_tail_mass(kernel, e)) {
                ++diag.ancient_immigrants;
                run_cluster({e - warmup, static_cast<std::uint32_t>(i), -1, next_cluster++, false});
              }
              e += rng.exponential(bound);
            }
          }
          block_start = block_end;
          block_end = std::min(end, 2.0 * block_end);
        }
      }
    }
  }

  auto& stream = result.stream;
  stream.labels = model.labels();
  stream.horizon = horizon;
  stream.seed = seed;
  stream.model_hash = model_hash(model);
  for (std::size_t i = 0; i < d; ++i) finalize_component(times[i], record, i, stream.jittered);
  stream.events = std::move(times);
  // jitter can in principle push the last event past T
  for (auto& seq : stream.events) {
    while (!seq.empty() && seq.back() >= horizon) seq.pop_back();
  }
  if (record) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t n = stream.events[i].size();
      genealogy.ancestor_type[i].resize(n);
      genealogy.immigrant[i].resize(n);
      genealogy.cluster[i].resize(n);
    }
    result.genealogy = std::move(genealogy);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Thinning

SimulationResult simulate_thinning(const HawkesModel& model, double horizon, std::uint64_t seed,
                                   const ThinningOptions& options) {
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::Domain, "simulation horizon must be > 0");
  require(options.tail_tolerance > 0.0 && options.tail_tolerance < 1.0, ErrorKind::Domain,
          "tail tolerance must be in (0, 1)");
  const auto table = tabulate(model);
  const std::size_t d = table.d;
  SimulationResult result;
  auto& diag = result.diagnostics;
  const auto stability = spectral_radius_check(model);
  diag.radius = stability.radius;
  diag.stationary = stability.stationary;
  if (!stability.stationary) {
    diag.warnings.push_back("spectral radius " + std::to_string(stability.radius) +
                            (stability.conservative ? " (conservative |phi| bound)" : "") + " is >= 1");
  }
  bool capped = false;
  const double warmup = choose_warmup(model, horizon, options.max_warmup, &capped);
  diag.warmup = warmup;
  if (capped) diag.warnings.push_back("burn-in capped at " + std::to_string(options.max_warmup) + " s");

  std::vector<double> lambda;
  if (options.ancient_history && warmup > 0.0 && model.mode() == Mode::Linear) lambda = stationary_lambda(model);

  // truncation horizons
  std::vector<double> cutoff(d * d, 0.0);
  std::vector<double> source_cutoff(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!table.active[i * d + j]) continue;
      cutoff[i * d + j] = kernel_truncation_horizon(model.kernel(i, j), options.tail_tolerance);
      source_cutoff[j] = std::max(source_cutoff[j], cutoff[i * d + j]);
    }
  }

  std::vector<std::vector<double>> history(d);
  std::vector<double> raw(d);

  auto ancient = [&](std::size_t i, double t) {
    if (lambda.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (table.active[i * d + j]) sum += lambda[j] * kernel_tail_mass(model.kernel(i, j), t + warmup);
    }
    return sum;
  };

  // raw (unclamped) intensities at t, or dominating envelope if `envelope`
  auto intensities = [&](double t, bool envelope, std::vector<double>& out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = model.mu()[i] + ancient(i, t);
    for (std::size_t j = 0; j < d; ++j) {
      const auto& seq = history[j];
      for (std::size_t k = seq.size(); k-- > 0;) {
        const double lag = t - seq[k];
        if (lag > source_cutoff[j]) break;
        for (std::size_t i = 0; i < d; ++i) {
          const std::size_t idx = i * d + j;
          if (!table.active[idx] || lag > cutoff[idx]) continue;
          out[i] += envelope ? kernel_positive_envelope(model.kernel(i, j), lag) : kernel_eval(model.kernel(i, j), lag);
        }
      }
    }
  };

  const std::size_t probes = options.intensity_probes;
  std::size_t next_probe = 0;
  std::size_t all_positive = 0;
  std::vector<std::size_t> positive(d, 0);
  auto probe_until = [&](double limit) {
    while (next_probe < probes) {
      const double p = (static_cast<double>(next_probe) + 0.5) * horizon / static_cast<double>(probes);
      if (p >= limit) break;
      intensities(p, false, raw);
      bool all = true;
      for (std::size_t i = 0; i < d; ++i) {
        if (raw[i] > 0.0) ++positive[i];
        else all = false;
      }
      if (all) ++all_positive;
      ++next_probe;
    }
  };

  double max_mu = 0.0;
  for (double m : model.mu()) max_mu = std::max(max_mu, m);
  double base_refresh = 0.1 * table.min_scale;
  if (max_mu > 0.0) base_refresh = std::min(base_refresh, 1.0 / max_mu);
  if (!std::isfinite(base_refresh)) base_refresh = horizon;

  Rng rng(seed);
  std::vector<double> bound_terms(d);
  double s = -warmup;
  double refresh = base_refresh;
  while (s < horizon) {
    intensities(s, true, bound_terms);
    double bound = 0.0;
    for (double b : bound_terms) bound += std::max(0.0, b);
    if (!(bound > 0.0)) {
      // envelopes never increase: nothing can happen after s
      if (lambda.empty()) break;
      probe_until(std::min(horizon, s + refresh));
      s += refresh;
      refresh *= 2.0;
      continue;
    }
    const double gap = rng.exponential(bound);
    if (gap > refresh) {
      probe_until(std::min(horizon, s + refresh));
      s += refresh;
      refresh *= 2.0;
      continue;
    }
    const double candidate = s + gap;
    if (candidate >= horizon) break;
    probe_until(candidate);
    ++diag.proposals;
    intensities(candidate, false, raw);
    double total = 0.0;
    for (double& r : raw) {
      r = std::max(0.0, r);
      total += r;
    }
    const double u = rng.uniform() * bound;
    if (u < total) {
      double acc = 0.0;
      std::size_t chosen = d - 1;
      for (std::size_t i = 0; i < d; ++i) {
        acc += raw[i];
        if (u < acc) {
          chosen = i;
          break;
        }
      }
      history[chosen].push_back(candidate);
      ++diag.generated;
      refresh = base_refresh;
    }
    s = candidate;
  }
  probe_until(horizon);

  if (probes > 0) {
    diag.positive_fraction = static_cast<double>(all_positive) / static_cast<double>(probes);
    for (std::size_t i = 0; i < d; ++i) {
      diag.positive_fraction_per_component.push_back(static_cast<double>(positive[i]) / static_cast<double>(probes));
    }
  }

  auto& stream = result.stream;
  stream.labels = model.labels();
  stream.horizon = horizon;
  stream.seed = seed;
  stream.model_hash = model_hash(model);
  for (std::size_t i = 0; i < d; ++i) {
    auto& seq = history[i];
    seq.erase(seq.begin(), std::lower_bound(seq.begin(), seq.end(), 0.0));
    stream.jittered += enforce_strict_order(seq);
    while (!seq.empty() && seq.back() >= horizon) seq.pop_back();
  }
  stream.events = std::move(history);
  return result;
}

}  // namespace hawkes
