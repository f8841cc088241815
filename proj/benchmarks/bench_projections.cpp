#include <benchmark/benchmark.h>

#include "sketchls/projections.hpp"
#include "sketchls/rng.hpp"

using namespace sketchls;

namespace {

void BM_ProjectL1(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(5);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = rng.normal();
  const double r = 0.1 * v.cwiseAbs().sum();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_l1(v, r));
  }
}

void BM_ProjectTransformedL1(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(6);
  Matrix G(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  const Matrix phi = qr.householderQ() * Matrix::Identity(d, d);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_transformed_l1(v, phi, 1.0));
  }
}

void BM_ProjectNuclear(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(7);
  Matrix X(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) X(i, j) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_nuclear(X, 1.0));
  }
}

}  // namespace

BENCHMARK(BM_ProjectL1)->Arg(100)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ProjectTransformedL1)->Arg(100)->Arg(500);
BENCHMARK(BM_ProjectNuclear)->Arg(50)->Arg(200);
