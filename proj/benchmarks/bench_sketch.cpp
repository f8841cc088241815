#include <benchmark/benchmark.h>

#include "sketchls/rng.hpp"
#include "sketchls/sketch.hpp"

using namespace sketchls;

namespace {

Matrix random_matrix(std::uint64_t seed, Index r, Index c) {
  Rng rng(seed);
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

void BM_CountSketchApply(benchmark::State& state) {
  const Index n = state.range(0);
  const Index d = 100;
  const Index m = 8 * d;
  const Matrix A = random_matrix(1, n, d);
  SketchOperator s = make_sketch(SketchKind::Count, m, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.apply(A));
  }
  state.SetItemsProcessed(state.iterations() * n * d);
}

void BM_GaussianSketchApply(benchmark::State& state) {
  const Index n = state.range(0);
  const Index d = 100;
  const Index m = 8 * d;
  const Matrix A = random_matrix(1, n, d);
  SketchOperator s = make_sketch(SketchKind::Gaussian, m, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.apply(A));
  }
  state.SetItemsProcessed(state.iterations() * n * d);
}

void BM_SketchBuild(benchmark::State& state) {
  const Index n = state.range(0);
  const Index m = 800;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_sketch(SketchKind::Count, m, n, seed++));
  }
}

}  // namespace

BENCHMARK(BM_CountSketchApply)->Arg(10000)->Arg(100000);
BENCHMARK(BM_GaussianSketchApply)->Arg(10000)->Arg(100000);
BENCHMARK(BM_SketchBuild)->Arg(10000)->Arg(100000);
