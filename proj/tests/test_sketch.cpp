#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "sketchls/rng.hpp"
#include "sketchls/sketch.hpp"

using namespace sketchls;

TEST_CASE("apply agrees with the materialized operator") {
  Rng rng(1);
  Matrix M(24, 5);
  for (Index i = 0; i < 24; ++i)
    for (Index j = 0; j < 5; ++j) M(i, j) = rng.normal();

  for (SketchKind kind : {SketchKind::Gaussian, SketchKind::Count}) {
    SketchOperator s = make_sketch(kind, 8, 24, 99);
    CHECK((s.apply(M) - s.dense() * M).norm() < 1e-12);
  }
}

TEST_CASE("count sketch has one +/- sqrt(m) entry per column") {
  SketchOperator s = SketchOperator::count(8, 64, 5);
  const Matrix S = s.dense();
  const double mag = std::sqrt(8.0);
  for (Index j = 0; j < 64; ++j) {
    int nonzeros = 0;
    for (Index i = 0; i < 8; ++i) {
      if (S(i, j) != 0.0) {
        ++nonzeros;
        CHECK(std::abs(std::abs(S(i, j)) - mag) < 1e-15);
      }
    }
    CHECK(nonzeros == 1);
  }
  // S^T S / m has an exact unit diagonal for the count sketch.
  const Matrix G = S.transpose() * S / 8.0;
  for (Index j = 0; j < 64; ++j) CHECK(G(j, j) == doctest::Approx(1.0));
}

TEST_CASE("sketches are deterministic per seed") {
  for (SketchKind kind : {SketchKind::Gaussian, SketchKind::Count}) {
    SketchOperator a = make_sketch(kind, 6, 20, 7);
    SketchOperator b = make_sketch(kind, 6, 20, 7);
    SketchOperator c = make_sketch(kind, 6, 20, 8);
    CHECK((a.dense() - b.dense()).norm() == 0.0);
    CHECK((a.dense() - c.dense()).norm() > 0.0);
  }
}

TEST_CASE("mean of S^T S / m approaches the identity") {
  const Index m = 16, n = 32;
  const int seeds = 300;
  for (SketchKind kind : {SketchKind::Gaussian, SketchKind::Count}) {
    Matrix acc = Matrix::Zero(n, n);
    for (int t = 0; t < seeds; ++t) {
      const Matrix S = make_sketch(kind, m, n, 1000 + t).dense();
      acc += S.transpose() * S / static_cast<double>(m);
    }
    acc /= static_cast<double>(seeds);
    const double dev = (acc - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    // Entry std is about 1/sqrt(m * seeds) ~ 0.014; allow a generous margin
    // for the max over n^2 entries.
    CHECK(dev < 6.0 / std::sqrt(static_cast<double>(m) * seeds));
  }
}

TEST_CASE("explicit count hook builds a scaled permutation") {
  const Index n = 6;
  std::vector<Index> bucket(n);
  std::iota(bucket.begin(), bucket.end(), Index{0});
  std::vector<double> sign(n, 1.0);
  SketchOperator s = SketchOperator::count_explicit(bucket, sign, n);
  const Matrix S = s.dense();
  CHECK((S - std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n)).norm() ==
        0.0);
}

TEST_CASE("dimension validation") {
  CHECK_THROWS_AS(SketchOperator::count(10, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(SketchOperator::gaussian(0, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(SketchOperator::count_explicit({0, 5}, {1.0, 1.0}, 3),
                  std::invalid_argument);

  SketchOperator s = SketchOperator::count(4, 16, 0);
  CHECK_THROWS_AS(s.apply(Matrix::Zero(8, 2)), dimension_error);

  LSProblem p;
  p.A = Matrix::Identity(10, 3);
  p.y = Matrix::Zero(10, 1);
  CHECK_THROWS_AS(sketch_problem_cs(p, SketchOperator::count(4, 12, 0)),
                  dimension_error);
  auto [sa, sy] = sketch_problem_cs(p, SketchOperator::count(4, 10, 0));
  CHECK(sa.rows() == 4);
  CHECK(sy.rows() == 4);
}
