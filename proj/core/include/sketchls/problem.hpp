#ifndef SKETCHLS_PROBLEM_HPP
#define SKETCHLS_PROBLEM_HPP

#include <Eigen/Dense>

#include "sketchls/errors.hpp"

namespace sketchls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ConstraintKind { Unconstrained, L1Ball, TransformedL1Ball, NuclearBall };

// Feasible set for the regression variable. The variable is a d x q matrix;
// q = 1 for the vector-valued constraints, q > 1 only for the nuclear ball.
struct ConstraintSet {
  ConstraintKind kind = ConstraintKind::Unconstrained;
  double radius = 0.0;
  Matrix phi;       // orthogonal transform, TransformedL1Ball only
  Index var_rows = 0;  // variable shape, NuclearBall only
  Index var_cols = 0;

  static ConstraintSet unconstrained();
  static ConstraintSet l1_ball(double r);
  // Validates || phi^T phi - I ||_max <= 1e-10.
  static ConstraintSet transformed_l1_ball(Matrix phi, double r);
  static ConstraintSet nuclear_ball(double r, Index rows, Index cols);

  // Constraint functional at x (l1 norm, transformed l1 norm, nuclear norm; 0
  // when unconstrained).
  double value(const Matrix& x) const;
};

// Constrained least-squares instance: minimize (1/2) || y - A x ||_F^2 over
// the constraint set. y is n x q; q > 1 is the multiple-response case.
struct LSProblem {
  Matrix A;
  Matrix y;
  ConstraintSet constraint;

  Index n() const { return A.rows(); }
  Index d() const { return A.cols(); }
  Index q() const { return y.cols(); }

  void check() const;  // throws dimension_error on inconsistent shapes
};

struct SpectralConstants {
  double L = 0.0;   // largest eigenvalue of A^T A
  double mu = 0.0;  // smallest eigenvalue of A^T A
};

struct RelativeError {
  double value = 0.0;
  bool exact_recovery = false;  // value < 1e-10
};

double objective(const LSProblem& p, const Matrix& x);
Matrix full_gradient(const LSProblem& p, const Matrix& x);

// Extreme eigenvalues of A^T A to relative tolerance tol. Uses a full
// eigendecomposition for d <= 500, power iterations above that.
SpectralConstants spectral_constants(const LSProblem& p, double tol = 1e-10);

// (f(x) - f_star) / f_star, clamped below at 1e-16. Requires f_star > 0.
RelativeError relative_error(const LSProblem& p, const Matrix& x, double f_star);
RelativeError relative_error_from_value(double f, double f_star);

// Spectral norm squared ||M||_2^2 via power iteration on M^T M.
double spectral_norm_sq(const Matrix& M, double tol = 1e-4, int max_iters = 500);

}  // namespace sketchls

#endif
