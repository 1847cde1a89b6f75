#include <doctest.h>

#include "invariants.hpp"

using namespace invariant_checks;

namespace {

const Scenario& scenario() {
  static const Scenario s(21);
  return s;
}

void report(const Outcome& o) {
  INFO(o.detail);
  CHECK(o.pass);
}

}  // namespace

TEST_CASE("poisson null: few bins beyond three standard errors") {
  for (std::uint64_t seed : {1, 2, 3}) report(poisson_null(seed));
}

TEST_CASE("claw symmetry identity") { report(claw_symmetry(scenario().claw)); }

TEST_CASE("psi norm algebra") {
  report(psi_algebra(scenario().estimate.norm_matrix()));
  report(psi_algebra(hawkes::norm_matrix(scenario().model)));
}

TEST_CASE("solver residual") { report(solver_residual(scenario().estimate)); }

TEST_CASE("cumulated curves end at the norm entries") { report(cumulated_endpoint(scenario().estimate)); }

TEST_CASE("genealogy conservation") {
  report(genealogy_conservation(scenario().model, scenario().sim));
  const Scenario other(22);
  report(genealogy_conservation(other.model, other.sim));
}
