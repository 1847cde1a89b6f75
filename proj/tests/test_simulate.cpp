#include "hawkes/error.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <numeric>

using namespace hawkes;
using testing_support::ks_critical_1pct;
using testing_support::ks_statistic;

namespace {

HawkesModel exp_pair() {
  return HawkesModel({"a", "b"}, {0.5, 0.3},
                     {ExponentialKernel{0.4, 1.0}, ExponentialKernel{0.2, 2.0}, ExponentialKernel{0.1, 0.5},
                      ExponentialKernel{0.3, 1.0}});
}

// Time-rescaled inter-event gaps of component i for an all-exponential model,
// from the compensator written out directly (events after `skip` only).
std::vector<double> rescaled_gaps(const HawkesModel& m, const EventStream& s, std::size_t i, double skip) {
  const std::size_t d = m.dimension();
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < d; ++j) {
    for (double t : s.events[j]) all.emplace_back(t, j);
  }
  std::sort(all.begin(), all.end());
  // state[j]: sum over past j-events of exp(-rate_ij (t - s))
  std::vector<double> state(d, 0.0);
  double last = 0.0;
  double acc = 0.0;
  bool started = false;
  std::vector<double> gaps;
  for (const auto& [t, j] : all) {
    const double dt = t - last;
    double inc = m.mu()[i] * dt;
    for (std::size_t l = 0; l < d; ++l) {
      const auto& k = std::get<ExponentialKernel>(m.kernel(i, l));
      inc += k.branching * state[l] * (1.0 - std::exp(-k.rate * dt));
      state[l] *= std::exp(-k.rate * dt);
    }
    acc += inc;
    last = t;
    if (j == i && t > skip) {
      if (started) gaps.push_back(acc);
      started = true;
      acc = 0.0;
    }
    state[j] += 1.0;
  }
  return gaps;
}

}  // namespace

TEST_CASE("poisson special case") {
  const HawkesModel m({"a", "b"}, {2.0, 0.5}, {zero_kernel(), zero_kernel(), zero_kernel(), zero_kernel()});
  const auto r = simulate_branching(m, 20000.0, 3);
  CHECK(std::abs(r.stream.events[0].size() - 40000.0) < 3 * std::sqrt(40000.0));
  CHECK(std::abs(r.stream.events[1].size() - 10000.0) < 3 * std::sqrt(10000.0));
  std::vector<double> gaps;
  for (std::size_t k = 1; k < r.stream.events[0].size(); ++k) gaps.push_back(r.stream.events[0][k] - r.stream.events[0][k - 1]);
  CHECK(ks_statistic(gaps, [](double x) { return 1.0 - std::exp(-2.0 * x); }) < ks_critical_1pct(gaps.size()));
}

TEST_CASE("time rescaling: branching and thinning give unit-rate gaps") {
  const auto m = exp_pair();
  const auto br = simulate_branching(m, 30000.0, 11);
  const auto th = simulate_thinning(m, 30000.0, 12);
  for (const auto* r : {&br, &th}) {
    r->stream.validate();
    for (std::size_t i = 0; i < 2; ++i) {
      const auto gaps = rescaled_gaps(m, r->stream, i, 50.0);
      const double d = ks_statistic(gaps, [](double x) { return 1.0 - std::exp(-x); });
      CHECK(d < ks_critical_1pct(gaps.size()));
    }
  }
}

TEST_CASE("stationary rate of a one-dimensional process") {
  const HawkesModel m({"x"}, {0.4}, {ExponentialKernel{0.6, 2.0}});
  const double horizon = 50000.0;
  const double lambda = 0.4 / 0.4;
  // Var N(T) ~ Lambda T / (1 - n)^2
  const double se = std::sqrt(lambda / horizon) / 0.4;
  for (std::uint64_t seed : {1, 2}) {
    const auto r = simulate_branching(m, horizon, seed);
    CHECK(std::abs(r.stream.events[0].size() / horizon - lambda) < 3 * se);
    CHECK(r.diagnostics.radius == doctest::Approx(0.6));
  }
}

TEST_CASE("seeded runs are reproducible") {
  const auto m = exp_pair();
  const auto a = simulate_branching(m, 2000.0, 5);
  const auto b = simulate_branching(m, 2000.0, 5);
  const auto c = simulate_branching(m, 2000.0, 6);
  CHECK(a.stream.events == b.stream.events);
  CHECK(a.stream.events != c.stream.events);
  CHECK(a.stream.seed == std::optional<std::uint64_t>(5));
  const auto t1 = simulate_thinning(m, 2000.0, 5);
  const auto t2 = simulate_thinning(m, 2000.0, 5);
  CHECK(t1.stream.events == t2.stream.events);
}

TEST_CASE("genealogy is aligned with the events") {
  const auto m = exp_pair();
  BranchingOptions opts;
  opts.record_genealogy = true;
  const auto r = simulate_branching(m, 20000.0, 8, opts);
  REQUIRE(r.genealogy.has_value());
  const auto& g = *r.genealogy;
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(g.ancestor_type[i].size() == r.stream.events[i].size());
    REQUIRE(g.immigrant[i].size() == r.stream.events[i].size());
    const double immigrants = std::accumulate(g.immigrant[i].begin(), g.immigrant[i].end(), 0.0);
    const double expected = m.mu()[i] * 20000.0;
    CHECK(std::abs(immigrants - expected) < 4 * std::sqrt(expected));
    for (std::size_t k = 0; k < g.immigrant[i].size(); ++k) {
      if (g.immigrant[i][k]) CHECK(g.ancestor_type[i][k] == static_cast<std::int32_t>(i));
    }
  }
}

TEST_CASE("warm-up length") {
  const HawkesModel fast({"x"}, {1.0}, {ExponentialKernel{0.5, 10.0}});
  const double w = choose_warmup(fast, 1000.0, 20000.0);
  CHECK(w >= 1.0);
  CHECK(w < 100.0);
  const HawkesModel slow({"x"}, {0.05}, {PowerLawKernel{0.06, 0.005, 1.3}});
  bool capped = false;
  CHECK(choose_warmup(slow, 1e6, 20000.0, &capped) == 20000.0);
  CHECK(capped);
}

TEST_CASE("unstable and rectified models") {
  const HawkesModel explosive({"x"}, {1.0}, {ExponentialKernel{1.2, 1.0}});
  CHECK_THROWS_AS(simulate_branching(explosive, 10.0, 1), Error);
  try {
    simulate_branching(explosive, 10.0, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Instability);
  }
  std::vector<double> x, y;
  for (int k = 0; k <= 300; ++k) {
    x.push_back(0.05 * k);
    y.push_back(-0.2 * std::exp(-0.05 * k));
  }
  const HawkesModel rect({"a", "b"}, {0.5, 0.5},
                         {ExponentialKernel{0.3, 1.0}, TabulatedKernel(x, y), ExponentialKernel{0.2, 1.0},
                          ExponentialKernel{0.1, 1.0}},
                         Mode::Rectified);
  CHECK_THROWS_AS(simulate_branching(rect, 10.0, 1), Error);
  const auto r = simulate_thinning(rect, 5000.0, 2);
  CHECK(r.diagnostics.positive_fraction > 0.95);
  CHECK(r.diagnostics.positive_fraction <= 1.0);
  // the negative kernel lowers the rate of a below its unclamped-free value
  const double free_rate = expected_intensities(HawkesModel({"a"}, {0.5}, {ExponentialKernel{0.3, 1.0}}))(0);
  CHECK(r.stream.events[0].size() / 5000.0 < free_rate);
}
