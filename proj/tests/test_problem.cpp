#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sketchls/data.hpp"
#include "sketchls/problem.hpp"
#include "sketchls/rng.hpp"

using namespace sketchls;

namespace {
Matrix randn(Rng& rng, Index r, Index c) {
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}
}  // namespace

TEST_CASE("objective and gradient agree with the quadratic form") {
  Rng rng(11);
  LSProblem p;
  p.A = randn(rng, 30, 7);
  p.y = randn(rng, 30, 1);
  Matrix x = randn(rng, 7, 1);
  const Matrix r = p.y - p.A * x;
  CHECK(objective(p, x) == doctest::Approx(0.5 * r.squaredNorm()).epsilon(1e-12));
  CHECK((full_gradient(p, x) + p.A.transpose() * r).norm() < 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    LSProblem p;
    p.A = randn(rng, 25, 6);
    p.y = randn(rng, 25, 1);
    Matrix x = randn(rng, 6, 1);
    Matrix g = full_gradient(p, x);
    const double h = 1e-6;
    for (Index i = 0; i < 6; ++i) {
      Matrix xp = x, xm = x;
      xp(i, 0) += h;
      xm(i, 0) -= h;
      const double fd = (objective(p, xp) - objective(p, xm)) / (2.0 * h);
      CHECK(std::abs(fd - g(i, 0)) < 1e-5 * (1.0 + std::abs(g(i, 0))));
    }
  }
}

TEST_CASE("spectral_constants match a dense eigendecomposition") {
  Rng rng(3);
  LSProblem p;
  p.A = randn(rng, 40, 8);
  p.y = Matrix::Zero(40, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.A.transpose() * p.A);
  const SpectralConstants sc = spectral_constants(p);
  CHECK(sc.L == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-8));
  CHECK(sc.mu == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-6));
}

TEST_CASE("synthetic generator hits the requested conditioning") {
  SynthSpec spec;
  spec.n = 2000;
  spec.d = 50;
  spec.s = 5;
  spec.kappa = 1e4;
  spec.seed = 42;
  GeneratedProblem g = gen_synthetic(spec, false);
  const SpectralConstants sc = spectral_constants(g.problem);
  const double expected = std::pow(spec.kappa, 2.0 * 49.0 / 50.0);
  CHECK(sc.L / sc.mu == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("relative error clamps, flags recovery, and rejects bad f_star") {
  RelativeError re = relative_error_from_value(2.0, 1.0);
  CHECK(re.value == doctest::Approx(1.0));
  CHECK_FALSE(re.exact_recovery);

  re = relative_error_from_value(1.0 + 1e-20, 1.0);
  CHECK(re.value == doctest::Approx(1e-16));
  CHECK(re.exact_recovery);

  re = relative_error_from_value(1.0 + 5e-11, 1.0);
  CHECK(re.exact_recovery);
  re = relative_error_from_value(1.0 + 5e-10, 1.0);
  CHECK_FALSE(re.exact_recovery);

  CHECK_THROWS_AS(relative_error_from_value(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(relative_error_from_value(1.0, -1.0), std::domain_error);
}

TEST_CASE("constraint factories validate their inputs") {
  CHECK_THROWS_AS(ConstraintSet::l1_ball(-1.0), std::invalid_argument);
  Matrix skew(2, 2);
  skew << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(ConstraintSet::transformed_l1_ball(skew, 1.0), std::invalid_argument);

  LSProblem p;
  p.A = Matrix::Identity(4, 3);
  p.y = Matrix::Zero(5, 1);  // wrong row count
  p.constraint = ConstraintSet::unconstrained();
  CHECK_THROWS_AS(p.check(), dimension_error);

  p.y = Matrix::Zero(4, 2);  // q > 1 needs a nuclear constraint
  CHECK_THROWS_AS(p.check(), dimension_error);
  p.constraint = ConstraintSet::nuclear_ball(1.0, 3, 2);
  CHECK_NOTHROW(p.check());
}

TEST_CASE("spectral_norm_sq matches the SVD") {
  Rng rng(9);
  Matrix M = randn(rng, 20, 12);
  Eigen::JacobiSVD<Matrix> svd(M);
  const double exact = svd.singularValues()[0] * svd.singularValues()[0];
  CHECK(spectral_norm_sq(M, 1e-10, 5000) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("constraint value functional") {
  Vector v(3);
  v << 1.0, -2.0, 0.5;
  CHECK(ConstraintSet::l1_ball(10.0).value(v) == doctest::Approx(3.5));

  Matrix X = Matrix::Zero(3, 3);
  X(0, 0) = 2.0;
  X(1, 1) = 1.0;
  CHECK(ConstraintSet::nuclear_ball(10.0, 3, 3).value(X) == doctest::Approx(3.0));
}
