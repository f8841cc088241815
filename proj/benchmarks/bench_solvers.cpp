#include <benchmark/benchmark.h>

#include "sketchls/data.hpp"
#include "sketchls/solvers.hpp"

using namespace sketchls;

namespace {

GeneratedProblem& desk_problem() {
  static GeneratedProblem g = [] {
    SynthSpec spec;
    spec.n = 10000;
    spec.d = 100;
    spec.s = 10;
    spec.kappa = 1e4;
    spec.seed = 1;
    return gen_synthetic(spec, false);
  }();
  return g;
}

SolverConfig outer_loop_config() {
  SolverConfig cfg;
  cfg.m = 800;
  cfg.k = 10;
  cfg.N = 1;
  cfg.sketch = SketchKind::Count;
  cfg.seed = 3;
  cfg.step = StepPolicy::line_search();
  return cfg;
}

void BM_OuterLoopPlain(benchmark::State& state) {
  const GeneratedProblem& g = desk_problem();
  const SolverConfig cfg = outer_loop_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpis(g.problem, cfg));
  }
}

void BM_OuterLoopAccelerated(benchmark::State& state) {
  const GeneratedProblem& g = desk_problem();
  const SolverConfig cfg = outer_loop_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(acc_gpis(g.problem, cfg));
  }
}

void BM_FullGradientStep(benchmark::State& state) {
  const GeneratedProblem& g = desk_problem();
  Budgets b;
  b.epoch_budget = 1.5;  // exactly one full-gradient iteration
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        accelerated_pgd(g.problem, StepPolicy::fixed(), true, b));
  }
}

void BM_SagaEpoch(benchmark::State& state) {
  const GeneratedProblem& g = desk_problem();
  Budgets b;
  b.epoch_budget = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saga_minibatch(g.problem, 10, b, 4));
  }
}

}  // namespace

BENCHMARK(BM_OuterLoopPlain)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OuterLoopAccelerated)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FullGradientStep)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SagaEpoch)->Unit(benchmark::kMillisecond);
