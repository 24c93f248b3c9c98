#include <benchmark/benchmark.h>

#include <random>

#include "tvopt/engine.hpp"
#include "tvopt/problems.hpp"

namespace {

void tick(benchmark::State& state, tvopt::Algorithm algorithm) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tvopt::SeparableQuadraticTracker f(n, 1.0, 1.0);
  tvopt::SolverConfig cfg;
  cfg.algorithm = algorithm;
  cfg.x0.assign(n, 2.0);
  const tvopt::Tracker tracker(f, cfg);
  tvopt::Vector x = cfg.x0;
  double t = 0.0;
  for (auto _ : state) {
    const tvopt::PredictionOutcome p = tracker.predict(x, t, std::nullopt);
    x = tracker.update(p.x_pred, t + cfg.delta);
    t += cfg.delta;
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_TickAlg1(benchmark::State& state) { tick(state, tvopt::Algorithm::alg1); }
void BM_TickEuler2(benchmark::State& state) { tick(state, tvopt::Algorithm::euler2); }

void BM_SpdSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  tvopt::SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a.at(i, j) = 0.1 * normal(rng) + (i == j ? static_cast<double>(n) : 0.0);
  tvopt::Vector b(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tvopt::spd_solve(a, b));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_TickAlg1)->RangeMultiplier(10)->Range(100, 10000)->Complexity(benchmark::oN);
BENCHMARK(BM_TickEuler2)->RangeMultiplier(4)->Range(100, 1600)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_SpdSolve)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);

BENCHMARK_MAIN();
