#include "hawkes/claw.hpp"
#include "hawkes/error.hpp"
#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace hawkes;
using testing_support::brute_force_bins;

namespace {

EventStream clustered_stream(std::uint64_t seed, double horizon) {
  const HawkesModel m({"a", "b", "c"}, {0.8, 0.3, 0.05},
                      {ExponentialKernel{0.3, 5.0}, ExponentialKernel{0.2, 1.0}, zero_kernel(),
                       ExponentialKernel{0.4, 20.0}, zero_kernel(), ExponentialKernel{0.1, 0.2},
                       zero_kernel(), zero_kernel(), ExponentialKernel{0.5, 50.0}});
  return simulate_branching(m, horizon, seed).stream;
}

// integral of the interpolant, one piece per node interval
double numeric_mass(const ConditionalLawMatrix& c, std::size_t i, std::size_t j, double lo, double hi,
                    const std::function<double(double)>& weight) {
  std::vector<double> cuts{lo, hi, 0.0};
  for (double m : c.midpoints()) {
    cuts.push_back(m);
    cuts.push_back(-m);
  }
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = std::max(lo, cuts[k]);
    const double b = std::min(hi, cuts[k + 1]);
    if (b <= a) continue;
    // 3-point Gauss: interior nodes only, since cross laws jump at lag 0
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b), r = std::sqrt(0.6);
    for (auto [x, w] : {std::pair{-r, 5.0 / 9.0}, std::pair{0.0, 8.0 / 9.0}, std::pair{r, 5.0 / 9.0}}) {
      s += h * w * weight(mid + h * x) * c.value(i, j, mid + h * x);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("multiscale grid") {
  const auto g = build_multiscale_grid(1e-3, 1000.0, 0.05);
  CHECK(g.uniform_intervals == 20);
  CHECK(g.bins() == 20 + 277);
  CHECK(g.points.front() == 0.0);
  CHECK(g.points[20] == 1e-3);
  CHECK(g.end() >= 1000.0);
  CHECK(g.end() < 1000.0 * std::exp(0.05));
  for (std::size_t l = 21; l < g.points.size(); ++l) {
    CHECK(std::log(g.points[l] / g.points[l - 1]) == doctest::Approx(0.05));
  }
  CHECK(build_multiscale_grid(1e-3, 1e-3, 0.1).bins() == 10);
  CHECK_THROWS_AS(build_multiscale_grid(0.0, 1.0, 0.05), Error);
  CHECK_THROWS_AS(build_multiscale_grid(1.0, 0.5, 0.05), Error);
  CHECK_THROWS_AS(build_multiscale_grid(1e-3, 1.0, 1.5), Error);
}

TEST_CASE("bin counts equal brute-force pair enumeration") {
  // coarse timestamps create exact ties between shifted and raw times
  auto s = clustered_stream(4, 400.0);
  for (auto& seq : s.events) {
    for (double& t : seq) t = std::round(t * 1000.0) / 1000.0;
    seq.erase(std::unique(seq.begin(), seq.end()), seq.end());
  }
  const auto grid = build_multiscale_grid(0.01, 40.0, 0.1);
  const auto c = estimate_claw(s, grid);
  const auto lambda = estimate_lambda(s);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto ref = brute_force_bins(s.events[i], s.events[j], i == j, s.horizon, grid.points);
      const auto& p = c.pair(i, j);
      for (std::size_t l = 0; l < grid.bins(); ++l) {
        CHECK(p.counts[l] == ref[l].count);
        CHECK(p.conditioning[l] == ref[l].conditioning);
        const double expect = ref[l].conditioning
                                  ? ref[l].count / (grid.width(l) * ref[l].conditioning) - lambda[i]
                                  : 0.0;
        CHECK(p.values[l] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("thread count does not change the estimate") {
  const auto s = clustered_stream(9, 2000.0);
  const auto grid = build_multiscale_grid(1e-3, 50.0, 0.05);
  CHECK(estimate_claw(s, grid, {0.0, 1}) == estimate_claw(s, grid, {0.0, 4}));
}

TEST_CASE("interpolant, symmetry and integrals") {
  const auto s = clustered_stream(2, 3000.0);
  const auto c = estimate_claw(s, build_multiscale_grid(0.01, 20.0, 0.1));
  const auto& mid = c.midpoints();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& v = c.pair(i, j).values;
      CHECK(c.value(i, j, mid[3]) == v[3]);
      CHECK(c.value(i, j, 0.5 * (mid[5] + mid[6])) == doctest::Approx(0.5 * (v[5] + v[6])));
      CHECK(c.value(i, j, 0.25 * mid[0]) == v[0]);
      CHECK(c.value(i, j, mid.back() * 1.01) == 0.0);
      for (double t : {0.003, 0.7, 4.2}) {
        CHECK(c.value(i, j, -t) == c.value(j, i, t) * (c.lambda()[i] / c.lambda()[j]));
      }
      for (auto [lo, hi] : {std::pair{-3.0, 2.5}, std::pair{0.1, 7.0}, std::pair{-9.0, -0.02}}) {
        const auto seg = c.integrals(i, j, lo, hi);
        const double hi_ = hi;
        CHECK(seg.mass == doctest::Approx(numeric_mass(c, i, j, lo, hi, [](double) { return 1.0; })).epsilon(1e-9));
        CHECK(seg.moment ==
              doctest::Approx(numeric_mass(c, i, j, lo, hi, [&](double u) { return hi_ - u; })).epsilon(1e-9));
      }
      const auto ci = claw_integrals(c, i, j, 3.3);
      CHECK(ci.i0 == doctest::Approx(c.integrals(i, j, 0.0, 3.3).mass));
      CHECK(ci.i1 == doctest::Approx(numeric_mass(c, i, j, 0.0, 3.3, [](double u) { return u; })).epsilon(1e-9));
      const auto neg = claw_integrals(c, i, j, -1.5);
      CHECK(neg.i0 == doctest::Approx(-c.integrals(i, j, -1.5, 0.0).mass));
    }
  }
}

TEST_CASE("standard errors and resolution flags") {
  const auto s = clustered_stream(5, 1000.0);
  const auto c = estimate_claw(s, build_multiscale_grid(1e-3, 10.0, 0.1), {0.005, 1});
  for (std::size_t l = 0; l < c.grid().bins(); ++l) {
    CHECK(c.standard_error(0, 0, l) > 0.0);
    CHECK(c.reliable(l) == (c.midpoints()[l] >= 0.005));
  }
  CHECK_FALSE(c.reliable(0));
  CHECK(c.reliable(c.grid().bins() - 1));
}

TEST_CASE("claw documents round-trip") {
  const auto s = clustered_stream(6, 500.0);
  const auto c = estimate_claw(s, build_multiscale_grid(1e-3, 10.0, 0.05), {1e-4, 1});
  const std::string text = write_claw(c);
  const auto back = read_claw(text);
  CHECK(back == c);
  CHECK(write_claw(back) == text);
  CHECK_THROWS_AS(read_claw("{\"format\":\"hawkes-model\"}"), Error);
  CHECK_THROWS_AS(read_claw("[1,2"), Error);
}

TEST_CASE("estimator preconditions") {
  auto s = clustered_stream(7, 100.0);
  try {
    estimate_claw(s, build_multiscale_grid(1e-3, 1000.0, 0.05));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  s.events[2].clear();
  try {
    estimate_claw(s, build_multiscale_grid(1e-3, 10.0, 0.05));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyComponent);
  }
}
