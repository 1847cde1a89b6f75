#include "hawkes/analytics.hpp"
#include "hawkes/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

using namespace hawkes;

namespace {

// Adapted-style estimate with the given kernel functions sampled on a log grid.
KernelEstimate make_estimate(const std::vector<std::string>& labels,
                             const std::vector<std::function<double(double)>>& kernels,
                             const std::vector<double>& lambda) {
  KernelEstimate est;
  est.labels = labels;
  est.scheme = Scheme::Adapted;
  est.t_min = 1e-3;
  est.t_max = 50.0;
  est.k = 100;
  est.nodes = build_quadrature_grid(1e-3, 50.0, 100).points;
  const std::size_t d = labels.size();
  for (const auto& f : kernels) {
    std::vector<double> v;
    for (double t : est.nodes) v.push_back(f(t));
    est.phi.push_back(v);
  }
  est.norms.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) est.norms[i * d + j] = cumulative_norm(est, i, j).back();
  }
  est.lambda = lambda;
  est.mu = estimate_mu(est).mu;
  est.negative_mu = estimate_mu(est).negative;
  return est;
}

std::function<double(double)> expo(double n, double b) {
  return [=](double t) { return n * b * std::exp(-b * t); };
}

}  // namespace

TEST_CASE("psi norms: series and resolvent identities") {
  Eigen::MatrixXd n(3, 3);
  n << 0.2, 0.3, 0.0, 0.1, 0.25, -0.05, 0.0, 0.4, 0.3;
  const auto psi = psi_norms(n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK((psi - (n + n * psi)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(((id + psi) * (id - n) - id).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::MatrixXd series = Eigen::MatrixXd::Zero(3, 3), power = id;
  for (int k = 1; k < 400; ++k) {
    power = power * n;
    series += power;
  }
  CHECK((psi - series).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(spectral_radius(n) == doctest::Approx(n.eigenvalues().cwiseAbs().maxCoeff()));

  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.1, 1.0, 0.0;
  try {
    psi_norms(bad);
    FAIL("expected Instability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Instability);
  }
}

TEST_CASE("exogeneity and dressed fractions add up") {
  const auto est = make_estimate({"a", "b"}, {expo(0.3, 2.0), expo(0.2, 1.0), expo(0.1, 5.0), expo(0.4, 0.5)},
                                 {1.2, 0.8});
  const auto r = analyze(est);
  REQUIRE(r.psi_norms.size() == 4);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.exo_ratios[i] == doctest::Approx(est.mu[i] / est.lambda[i]));
    double total = r.exo_ratios[i];
    for (std::size_t j = 0; j < 2; ++j) total += r.dressed_fractions(i, j);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(r.radius == doctest::Approx(spectral_radius(est.norm_matrix())));
  CHECK(r.warnings.empty());
}

TEST_CASE("cumulated curves end at the norm entry") {
  const auto est = make_estimate({"a", "b"}, {expo(0.3, 2.0), expo(0.2, 1.0), expo(-0.1, 5.0), expo(0.4, 0.5)},
                                 {1.2, 0.8});
  const auto curves = cumulated_kernels(est);
  REQUIRE(curves.size() == 4);
  for (const auto& c : curves) {
    CHECK(c.raw.size() == est.nodes.size());
    CHECK(c.raw.back() == est.norm(c.target, c.source));
    CHECK(c.scale == est.lambda[c.source] / est.lambda[c.target]);
    CHECK(c.normalized.back() == c.scale * c.raw.back());
    CHECK(c.raw.front() == 0.0);
  }
}

TEST_CASE("pairings") {
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  CHECK(parse_pairing("a:b", labels) == Pairing{1, 0, 2, 3});
  CHECK(parse_pairing("a:b, c:d", labels) == Pairing{1, 0, 3, 2});
  for (const char* bad : {"a:z", "a:b,a:c", "a-b", "a:b,b:c"}) {
    try {
      parse_pairing(bad, labels);
      FAIL("expected Pairing for " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Pairing);
    }
  }
  CHECK_THROWS_AS(validate_pairing({1, 2, 0}, 3), Error);  // a 3-cycle is no involution
  CHECK_THROWS_AS(validate_pairing({0, 1}, 3), Error);
  CHECK_NOTHROW(validate_pairing(book_pairing(), 8));
  CHECK(book_labels().size() == 8);
  CHECK(book_labels()[book_pairing()[0]] == "P_b");
  CHECK(book_labels()[book_pairing()[5]] == "L_a");
}

TEST_CASE("l1 distance is exact for piecewise-linear estimates") {
  const auto est = make_estimate({"a", "b"},
                                 {expo(0.3, 2.0), [](double t) { return 0.1 * std::cos(t); }, expo(0.1, 5.0),
                                  [](double t) { return 0.1 * std::sin(t + 0.3); }},
                                 {1.0, 1.0});
  // reference: fine subdivision of each node interval, linear interpolation
  auto ref = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < est.nodes.size(); ++n) {
      const double a = est.nodes[n], b = est.nodes[n + 1];
      const int m = 2000;
      for (int q = 0; q < m; ++q) {
        const double t = a + (q + 0.5) * (b - a) / m;
        s += std::abs(est.value(i, j, t) - (k < 2 ? est.value(k, l, t) : 0.0)) * (b - a) / m;
      }
    }
    return s;
  };
  CHECK(l1_distance(est, 0, 1, 1, 1) == doctest::Approx(ref(0, 1, 1, 1)).epsilon(1e-5));
  CHECK(l1_magnitude(est, 0, 1) == doctest::Approx(ref(0, 1, 9, 9)).epsilon(1e-5));
  CHECK(l1_distance(est, 1, 0, 1, 0) == 0.0);
}

TEST_CASE("symmetry report") {
  const std::vector<std::function<double(double)>> sym{expo(0.3, 2.0), expo(0.6, 1.0), expo(0.6, 1.0),
                                                       expo(0.3, 2.0)};
  const auto est = make_estimate({"up", "down"}, sym, {1.0, 1.0});
  const auto rep = symmetry_report(est, {1, 0});
  CHECK(rep.median_l1 == 0.0);
  CHECK(rep.median_norm == 0.0);
  // unordered mirror pairs: (up<-up, down<-down) and (up<-down, down<-up)
  CHECK(rep.entries.size() == 2);
  for (const auto& e : rep.entries) CHECK_FALSE(e.flagged);

  const auto skew = make_estimate({"up", "down"}, {expo(0.3, 2.0), expo(0.6, 1.0), expo(0.4, 1.0), expo(0.3, 2.0)},
                                  {1.0, 1.0});
  const auto rep2 = symmetry_report(skew, {1, 0});
  bool flagged = false;
  for (const auto& e : rep2.entries) {
    if (e.target != e.source) {
      CHECK(e.norm_deviation == doctest::Approx(0.2 / 0.5).epsilon(1e-6));
      flagged = e.flagged;
    }
  }
  CHECK(flagged);

  // kernels that vanish on both sides stay below the floor-normalised threshold
  const auto tiny = make_estimate({"up", "down"}, {expo(0.001, 1.0), expo(0.0, 1.0), expo(0.0, 1.0), expo(-0.001, 1.0)},
                                  {1.0, 1.0});
  for (const auto& e : symmetry_report(tiny, {1, 0}).entries) CHECK_FALSE(e.flagged);
}

TEST_CASE("analysis of an explosive estimate keeps going") {
  const auto est = make_estimate({"a", "b"}, {expo(0.7, 1.0), expo(0.5, 1.0), expo(0.5, 1.0), expo(0.7, 1.0)},
                                 {1.0, 1.0});
  const auto r = analyze(est, Pairing{1, 0});
  CHECK(r.radius >= 1.0);
  CHECK(r.psi_norms.size() == 0);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.symmetry.has_value());
}

TEST_CASE("report outputs") {
  const auto est = make_estimate({"a", "b"}, {expo(0.3, 2.0), expo(0.2, 1.0), expo(0.1, 5.0), expo(0.4, 0.5)},
                                 {1.2, 0.8});
  const auto r = analyze(est, Pairing{1, 0});
  const auto doc = nlohmann::json::parse(write_report(r));
  CHECK(doc.contains("norm_matrix"));
  CHECK(doc.contains("exogeneity_ratios"));
  CHECK(doc.contains("symmetry"));
  const std::string table = format_tables(r);
  CHECK(table.find("||psibar||") != std::string::npos);
  const std::string tsv = matrix_tsv(r.norm_matrix, r.labels);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);
  CHECK(tsv.rfind("target\ta\tb\n", 0) == 0);
}
