#include "hawkes/claw.hpp"
#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/solver.hpp"

#include <benchmark/benchmark.h>

using namespace hawkes;

namespace {

HawkesModel power_law() { return HawkesModel({"x"}, {0.05}, {PowerLawKernel{0.06, 0.005, 1.3}}); }

HawkesModel exp_pair() {
  return HawkesModel({"a", "b"}, {0.5, 0.3},
                     {ExponentialKernel{0.4, 1.0}, ExponentialKernel{0.2, 2.0}, ExponentialKernel{0.1, 0.5},
                      ExponentialKernel{0.3, 1.0}});
}

const EventStream& power_law_events() {
  static const EventStream s = simulate_branching(power_law(), 1e5, 1).stream;
  return s;
}

}  // namespace

static void BM_SimulateBranching(benchmark::State& state) {
  const auto m = power_law();
  std::size_t events = 0;
  for (auto _ : state) {
    const auto r = simulate_branching(m, static_cast<double>(state.range(0)), 1);
    events += r.stream.total_events();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SimulateBranching)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SimulateThinning(benchmark::State& state) {
  const auto m = exp_pair();
  std::size_t events = 0;
  for (auto _ : state) {
    const auto r = simulate_thinning(m, static_cast<double>(state.range(0)), 1);
    events += r.stream.total_events();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SimulateThinning)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ConditionalLaw(benchmark::State& state) {
  const auto& s = power_law_events();
  const auto grid = build_multiscale_grid(1e-3, 1000.0, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_claw(s, grid, {0.0, 1}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.total_events()));
}
BENCHMARK(BM_ConditionalLaw)->Unit(benchmark::kMillisecond);

static void BM_SolveAdapted(benchmark::State& state) {
  const auto claw = analytic_claw_exponential(0.5, 1.0, 2.0);
  const auto grid = build_quadrature_grid(1e-3, 2000.0, static_cast<std::size_t>(state.range(0)));
  SolverOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernels(claw, grid, opts));
}
BENCHMARK(BM_SolveAdapted)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_SolveGauss(benchmark::State& state) {
  const auto claw = analytic_claw_exponential(0.5, 1.0, 2.0);
  SolverOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_kernels_gauss_logcv(claw, static_cast<std::size_t>(state.range(0)), 1e-3, 2000.0, opts));
  }
}
BENCHMARK(BM_SolveGauss)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
