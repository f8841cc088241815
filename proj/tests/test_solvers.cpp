#include <doctest.h>

#include <cmath>
#include <vector>

#include "sketchls/projections.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solvers.hpp"

using namespace sketchls;

namespace {

Matrix randn(Rng& rng, Index r, Index c) {
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

LSProblem random_problem(Rng& rng, Index n, Index d) {
  LSProblem p;
  p.A = randn(rng, n, d);
  p.y = randn(rng, n, 1);
  p.constraint = ConstraintSet::unconstrained();
  return p;
}

}  // namespace

TEST_CASE("line search hand example on f(x) = x^2 / 2") {
  // x_i = 1, grad = 1: a candidate at step eta lands at 1 - eta with model
  // value 1/2 - eta/2; the strict test passes exactly when eta < 1.
  auto f = [](const Matrix& x) { return 0.5 * x.squaredNorm(); };
  ConstraintSet none = ConstraintSet::unconstrained();
  Matrix x_i = Matrix::Ones(1, 1);
  Matrix grad = Matrix::Ones(1, 1);
  LineSearchResult r = line_search(f, none, x_i, 0.5, grad, 1.0, 2.0, 2.0);
  // Start at 2 (fail), 1 (fail: 0 < 0 is false), 0.5 (accept).
  CHECK(r.evals == 3);
  CHECK(r.eta == doctest::Approx(0.5));
  CHECK(r.x_next(0, 0) == doctest::Approx(0.5));
  CHECK(r.f_next == doctest::Approx(0.125));
  CHECK(r.model_value == doctest::Approx(0.25));
  CHECK(r.f_next < r.model_value);
}

TEST_CASE("line search short-circuits on a zero gradient") {
  auto f = [](const Matrix& x) { return 0.5 * x.squaredNorm(); };
  ConstraintSet none = ConstraintSet::unconstrained();
  Matrix x_i = Matrix::Ones(2, 1);
  Matrix grad = Matrix::Zero(2, 1);
  LineSearchResult r = line_search(f, none, x_i, 1.0, grad, 0.25, 2.0, 4.0);
  CHECK(r.evals == 0);
  CHECK(r.eta == doctest::Approx(1.0));  // gamma_d * eta_prev
  CHECK((r.x_next - x_i).norm() == 0.0);
}

TEST_CASE("line search rejects bad parameters") {
  auto f = [](const Matrix& x) { return 0.5 * x.squaredNorm(); };
  ConstraintSet none = ConstraintSet::unconstrained();
  Matrix x = Matrix::Ones(1, 1);
  CHECK_THROWS_AS(line_search(f, none, x, 0.5, x, 0.0, 2.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(line_search(f, none, x, 0.5, x, 1.0, 1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(line_search(f, none, x, 0.5, x, 1.0, 2.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("accepted line-search candidates beat the quadratic model") {
  Rng rng(101);
  ConstraintSet ball = ConstraintSet::l1_ball(1.0);
  for (int rep = 0; rep < 25; ++rep) {
    Matrix A = randn(rng, 12, 4);
    Matrix y = randn(rng, 12, 1);
    auto f = [&](const Matrix& v) { return 0.5 * (A * v - y).squaredNorm(); };
    Matrix x_i = project(ball, randn(rng, 4, 1)).point;
    Matrix grad = A.transpose() * (A * x_i - y);
    LineSearchResult r =
        line_search(f, ball, x_i, f(x_i), grad, 0.5 + rng.uniform(), 2.0, 2.0);
    if (r.evals == 0) continue;  // stationarity short-circuit
    CHECK(r.f_next < r.model_value);
    CHECK(ball.value(r.x_next) <= 1.0 + 1e-10);
  }
}

TEST_CASE("gradient restart criterion") {
  Matrix g(2, 1), xn(2, 1), xc(2, 1);
  g << 1.0, 0.0;
  xc << 0.0, 0.0;
  xn << 1.0, 5.0;
  CHECK(gradient_restart(g, xn, xc));
  xn << -1.0, 5.0;
  CHECK_FALSE(gradient_restart(g, xn, xc));
  xn << 0.0, 5.0;  // exactly zero inner product: no restart
  CHECK_FALSE(gradient_restart(g, xn, xc));
  CHECK_THROWS_AS(gradient_restart(g, Matrix::Zero(3, 1), xc), dimension_error);
}

TEST_CASE("sketched subproblem values and gradients") {
  Rng rng(7);
  Matrix As = randn(rng, 8, 4);
  Matrix ys = randn(rng, 8, 1);
  Matrix anchor = randn(rng, 4, 1);
  Matrix g = randn(rng, 4, 1);

  SketchedSubproblem cs = SketchedSubproblem::gpcs(As, ys);
  SketchedSubproblem hs = SketchedSubproblem::gpihs(As, anchor, g, 8.0);

  // At the anchor the sketched quadratic vanishes and only the linear
  // correction term remains.
  CHECK(hs.value(anchor) ==
        doctest::Approx(8.0 * anchor.cwiseProduct(g).sum()).epsilon(1e-12));

  for (const SketchedSubproblem* sp : {&cs, &hs}) {
    Matrix x = randn(rng, 4, 1);
    auto [val, grad] = sp->value_gradient(x);
    CHECK(val == doctest::Approx(sp->value(x)).epsilon(1e-12));
    CHECK((grad - sp->gradient(x)).norm() < 1e-12);
    const double h = 1e-6;
    for (Index i = 0; i < 4; ++i) {
      Matrix xp = x, xm = x;
      xp(i, 0) += h;
      xm(i, 0) -= h;
      const double fd = (sp->value(xp) - sp->value(xm)) / (2.0 * h);
      CHECK(std::abs(fd - grad(i, 0)) < 1e-5 * (1.0 + std::abs(grad(i, 0))));
    }
  }
  CHECK_THROWS_AS(cs.value(Matrix::Zero(5, 1)), dimension_error);
}

TEST_CASE("scaled-permutation sketch preserves the least-squares minimizer") {
  Rng rng(13);
  const Index n = 6, d = 3;
  LSProblem p = random_problem(rng, n, d);
  std::vector<Index> bucket(n);
  std::vector<double> sign(n, 1.0);
  for (Index i = 0; i < n; ++i) bucket[static_cast<std::size_t>(i)] = i;
  SketchOperator s = SketchOperator::count_explicit(bucket, sign, n);
  auto [As, ys] = sketch_problem_cs(p, s);
  SketchedSubproblem cs = SketchedSubproblem::gpcs(As, ys);

  const Matrix x_star = p.A.colPivHouseholderQr().solve(p.y);
  CHECK(cs.gradient(x_star).norm() < 1e-8 * (1.0 + x_star.norm()));
}

TEST_CASE("epoch accounting unit costs") {
  CHECK(epoch_account({EpochEvent::FullPass, 100, 0, 0}) == 1.0);
  CHECK(epoch_account({EpochEvent::SketchBuild, 100, 8, 0}) == 1.0);
  CHECK(epoch_account({EpochEvent::SketchedPass, 100, 8, 0}) ==
        doctest::Approx(0.08));
  CHECK(epoch_account({EpochEvent::SagaBatch, 100, 0, 10}) == doctest::Approx(0.1));
  CHECK(epoch_account({EpochEvent::Projection, 100, 0, 0}) == 0.0);
  CHECK_THROWS_AS(epoch_account({EpochEvent::SketchedPass, 0, 8, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(epoch_account({EpochEvent::SagaBatch, 100, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("solver epoch totals follow the per-loop formula") {
  Rng rng(21);
  LSProblem p = random_problem(rng, 64, 4);
  SolverConfig cfg;
  cfg.m = 8;
  cfg.N = 3;
  cfg.k = 5;
  cfg.seed = 2;
  cfg.step = StepPolicy::fixed();

  SolveResult r = gpis(p, cfg);
  // Each outer loop: 1 full pass + 1 sketch build + k sketched passes.
  CHECK(r.trace.final_epochs() ==
        doctest::Approx(3.0 * (2.0 + 5.0 * 8.0 / 64.0)).epsilon(1e-12));
  CHECK(r.trace.records.size() == 15);

  cfg.run_gpcs = true;
  cfg.k0 = 2;
  SolveResult r2 = gpis(p, cfg);
  // The classical-sketch phase adds 1 sketch build + k0 sketched passes.
  CHECK(r2.trace.final_epochs() ==
        doctest::Approx(1.0 + 2.0 * 8.0 / 64.0 + 3.0 * (2.0 + 5.0 * 8.0 / 64.0))
            .epsilon(1e-12));
  CHECK(r2.trace.records.size() == 17);
}

TEST_CASE("solver runs are deterministic for a fixed seed") {
  Rng rng(33);
  LSProblem p = random_problem(rng, 80, 6);
  p.constraint = ConstraintSet::l1_ball(0.8);
  SolverConfig cfg;
  cfg.m = 16;
  cfg.N = 4;
  cfg.k = 6;
  cfg.seed = 5;
  cfg.step = StepPolicy::line_search();

  SolveResult a = acc_gpis(p, cfg);
  SolveResult b = acc_gpis(p, cfg);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  CHECK((a.x - b.x).norm() == 0.0);
  for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].objective == b.trace.records[i].objective);
    CHECK(a.trace.records[i].step == b.trace.records[i].step);
    CHECK(a.trace.records[i].epochs == b.trace.records[i].epochs);
  }
}

TEST_CASE("config validation") {
  Rng rng(1);
  LSProblem p = random_problem(rng, 20, 3);
  SolverConfig cfg;
  cfg.m = 0;
  CHECK_THROWS_AS(gpis(p, cfg), std::invalid_argument);
  cfg.m = 4;
  cfg.k = 0;
  CHECK_THROWS_AS(gpis(p, cfg), std::invalid_argument);
  cfg.k = 1;
  cfg.step = StepPolicy::line_search(1.0);
  CHECK_THROWS_AS(gpis(p, cfg), std::invalid_argument);
}

TEST_CASE("accelerated descent meets the 2LR^2/(k+1)^2 guarantee") {
  Rng rng(55);
  LSProblem p = random_problem(rng, 60, 10);
  const SpectralConstants sc = spectral_constants(p);
  const Matrix x_star = p.A.colPivHouseholderQr().solve(p.y);
  const double f_star = objective(p, x_star);
  const double R2 = x_star.squaredNorm();  // start at zero

  for (int k : {10, 100}) {
    Budgets b;
    b.epoch_budget = static_cast<double>(k);
    SolveResult r = accelerated_pgd(p, StepPolicy::fixed(1.0 / sc.L), false, b, true);
    REQUIRE(static_cast<int>(r.trace.records.size()) == k);
    const double gap = r.trace.records.back().objective - f_star;
    CHECK(gap >= -1e-10);
    CHECK(gap <= 2.0 * sc.L * R2 / ((k + 1.0) * (k + 1.0)) * (1.0 + 1e-9));
  }
}

TEST_CASE("one-dimensional descent reaches machine precision quickly") {
  LSProblem p;
  p.A = Matrix(3, 1);
  p.A << 2.0, 1.0, -1.0;
  p.y = Matrix(3, 1);
  p.y << 4.0, 1.0, 0.5;
  p.constraint = ConstraintSet::unconstrained();
  const Matrix x_star = p.A.colPivHouseholderQr().solve(p.y);
  const double f_star = objective(p, x_star);

  Budgets b;
  b.epoch_budget = 30.0;
  SolveResult r = accelerated_pgd(p, StepPolicy::fixed(), true, b, false);
  CHECK(r.trace.records.back().objective - f_star < 1e-14 * (1.0 + f_star));
}

TEST_CASE("gradient restart fires on an ill-conditioned quadratic") {
  LSProblem p;
  p.A = Matrix::Zero(2, 2);
  p.A(0, 0) = 10.0;
  p.A(1, 1) = 0.2;
  p.y = Matrix(2, 1);
  p.y << 10.0, 0.2;
  p.constraint = ConstraintSet::unconstrained();
  const SpectralConstants sc = spectral_constants(p);

  Budgets b;
  b.epoch_budget = 200.0;
  SolveResult with = accelerated_pgd(p, StepPolicy::fixed(1.0 / sc.L), true, b, true);
  SolveResult without =
      accelerated_pgd(p, StepPolicy::fixed(1.0 / sc.L), false, b, true);

  int restarts = 0;
  for (const TraceRecord& rec : with.trace.records) restarts += rec.restarted ? 1 : 0;
  CHECK(restarts >= 1);
  for (const TraceRecord& rec : without.trace.records) CHECK_FALSE(rec.restarted);

  // Without restarts the momentum overshoots: the objective is not monotone.
  bool non_monotone = false;
  for (std::size_t i = 1; i < without.trace.records.size(); ++i) {
    if (without.trace.records[i].objective >
        without.trace.records[i - 1].objective) {
      non_monotone = true;
      break;
    }
  }
  CHECK(non_monotone);
}

TEST_CASE("single-batch incremental descent matches plain gradient descent") {
  Rng rng(77);
  const Index n = 24, d = 5;
  LSProblem p = random_problem(rng, n, d);

  Budgets b;
  b.epoch_budget = 10.5;
  SagaDiag diag;
  SolveResult got = saga_minibatch(p, n, b, 9, &diag);

  // Reference: with one batch the variance-reduced direction collapses to the
  // exact gradient, so the run is plain descent at step 1/(3 L_hat).
  const double lhat = spectral_norm_sq(p.A.middleRows(0, n), 1e-6, 200);
  const double eta = 1.0 / (3.0 * lhat);
  Matrix x = Matrix::Zero(d, 1);
  std::vector<double> want;
  for (int iter = 0; iter < 10; ++iter) {
    x = x - eta * (p.A.transpose() * (p.A * x - p.y));
    want.push_back(objective(p, x));
  }
  REQUIRE(got.trace.records.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got.trace.records[i].objective ==
          doctest::Approx(want[i]).epsilon(1e-13));
  }
  CHECK((got.x - x).norm() < 1e-12 * (1.0 + x.norm()));
  CHECK(diag.refresh_checks == 10);
  CHECK(diag.max_average_residual < 1e-12);
}

TEST_CASE("stored-gradient average stays consistent with the table") {
  Rng rng(88);
  LSProblem p = random_problem(rng, 100, 8);
  Budgets b;
  b.epoch_budget = 20.0;
  SagaDiag diag;
  saga_minibatch(p, 10, b, 3, &diag);
  CHECK(diag.refresh_checks > 0);
  CHECK(diag.max_average_residual < 1e-10);

  CHECK_THROWS_AS(saga_minibatch(p, 0, b, 0), std::invalid_argument);
  CHECK_THROWS_AS(saga_minibatch(p, 101, b, 0), std::invalid_argument);
}

TEST_CASE("target stop marks the trace complete, budget stop marks truncation") {
  Rng rng(91);
  LSProblem p = random_problem(rng, 60, 4);
  const Matrix x_star = p.A.colPivHouseholderQr().solve(p.y);
  const double f_star = objective(p, x_star);

  Budgets reach;
  reach.f_star = f_star;
  reach.rel_error_target = 1e-8;
  reach.epoch_budget = 10000.0;
  SolveResult ok = accelerated_pgd(p, StepPolicy::fixed(), true, reach, true);
  CHECK_FALSE(ok.trace.truncated);
  CHECK(ok.trace.records.back().rel_error < 1e-8);

  Budgets starve = reach;
  starve.epoch_budget = 2.0;
  SolveResult cut = accelerated_pgd(p, StepPolicy::fixed(), true, starve, true);
  CHECK(cut.trace.truncated);
}
