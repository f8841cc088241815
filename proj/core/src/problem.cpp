#include "sketchls/problem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <string>

namespace sketchls {

namespace {

void check_variable_shape(const LSProblem& p, const Matrix& x) {
  if (x.rows() != p.d() || x.cols() != p.q()) {
    throw dimension_error("variable is " + std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()) + ", expected " +
                          std::to_string(p.d()) + "x" + std::to_string(p.q()));
  }
}

}  // namespace

ConstraintSet ConstraintSet::unconstrained() { return ConstraintSet{}; }

ConstraintSet ConstraintSet::l1_ball(double r) {
  if (r < 0.0) throw std::invalid_argument("l1 radius must be nonnegative");
  ConstraintSet c;
  c.kind = ConstraintKind::L1Ball;
  c.radius = r;
  return c;
}

ConstraintSet ConstraintSet::transformed_l1_ball(Matrix phi, double r) {
  if (r < 0.0) throw std::invalid_argument("l1 radius must be nonnegative");
  if (phi.rows() != phi.cols()) throw std::invalid_argument("phi must be square");
  const Matrix gram = phi.transpose() * phi;
  const double dev = (gram - Matrix::Identity(phi.rows(), phi.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument("phi is not orthogonal (max deviation " +
                                std::to_string(dev) + ")");
  }
  ConstraintSet c;
  c.kind = ConstraintKind::TransformedL1Ball;
  c.radius = r;
  c.phi = std::move(phi);
  return c;
}

ConstraintSet ConstraintSet::nuclear_ball(double r, Index rows, Index cols) {
  if (r < 0.0) throw std::invalid_argument("nuclear radius must be nonnegative");
  ConstraintSet c;
  c.kind = ConstraintKind::NuclearBall;
  c.radius = r;
  c.var_rows = rows;
  c.var_cols = cols;
  return c;
}

double ConstraintSet::value(const Matrix& x) const {
  switch (kind) {
    case ConstraintKind::Unconstrained:
      return 0.0;
    case ConstraintKind::L1Ball:
      return x.cwiseAbs().sum();
    case ConstraintKind::TransformedL1Ball:
      return (phi * x).cwiseAbs().sum();
    case ConstraintKind::NuclearBall: {
      Eigen::JacobiSVD<Matrix> svd(x);
      return svd.singularValues().sum();
    }
  }
  return 0.0;
}

void LSProblem::check() const {
  if (y.rows() != A.rows()) {
    throw dimension_error("y has " + std::to_string(y.rows()) +
                          " rows, A has " + std::to_string(A.rows()));
  }
  if (constraint.kind == ConstraintKind::NuclearBall) {
    if (constraint.var_rows != d() || constraint.var_cols != q()) {
      throw dimension_error("nuclear constraint shape does not match problem");
    }
  } else if (q() != 1) {
    throw dimension_error("matrix-shaped response requires a nuclear constraint");
  }
}

double objective(const LSProblem& p, const Matrix& x) {
  check_variable_shape(p, x);
  return 0.5 * (p.y - p.A * x).squaredNorm();
}

Matrix full_gradient(const LSProblem& p, const Matrix& x) {
  check_variable_shape(p, x);
  return p.A.transpose() * (p.A * x - p.y);
}

SpectralConstants spectral_constants(const LSProblem& p, double tol) {
  const Matrix& A = p.A;
  if (A.size() == 0) throw std::invalid_argument("A is empty");
  const Index d = A.cols();
  if (d <= 500) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A);
    if (eig.info() != Eigen::Success) {
      throw convergence_error("eigendecomposition of A^T A failed", 0.0, 0.0);
    }
    SpectralConstants c;
    c.mu = std::max(0.0, eig.eigenvalues().minCoeff());
    c.L = eig.eigenvalues().maxCoeff();
    return c;
  }
  // Power iteration for L, then shifted power iteration for mu.
  const int cap = 100000;
  auto power = [&](const std::function<Vector(const Vector&)>& op) -> double {
    Vector v = Vector::Ones(d).normalized();
    double lambda = 0.0;
    for (int it = 0; it < cap; ++it) {
      Vector w = op(v);
      const double next = v.dot(w);
      const double nrm = w.norm();
      if (nrm == 0.0) return 0.0;
      v = w / nrm;
      if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
      lambda = next;
    }
    throw convergence_error("power iteration did not converge", lambda, lambda);
  };
  SpectralConstants c;
  c.L = power([&](const Vector& v) { return Vector(A.transpose() * (A * v)); });
  const double shift = c.L * (1.0 + 1e-8);
  const double top_shifted = power([&](const Vector& v) {
    return Vector(shift * v - A.transpose() * (A * v));
  });
  c.mu = std::max(0.0, shift - top_shifted);
  return c;
}

RelativeError relative_error_from_value(double f, double f_star) {
  if (f_star <= 0.0) throw std::domain_error("f_star must be positive");
  RelativeError r;
  r.value = std::max((f - f_star) / f_star, 1e-16);
  r.exact_recovery = r.value < 1e-10;
  return r;
}

RelativeError relative_error(const LSProblem& p, const Matrix& x, double f_star) {
  return relative_error_from_value(objective(p, x), f_star);
}

double spectral_norm_sq(const Matrix& M, double tol, int max_iters) {
  const Index d = M.cols();
  if (d == 0 || M.rows() == 0) throw std::invalid_argument("empty matrix");
  Vector v = Vector::Ones(d).normalized();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = M.transpose() * (M * v);
    const double next = v.dot(w);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace sketchls
