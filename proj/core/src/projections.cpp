#include "sketchls/projections.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sketchls {

ProjectionResult project_l1(const Vector& v, double r) {
  if (r < 0.0) throw std::invalid_argument("l1 radius must be nonnegative");
  const Index d = v.size();
  if (v.cwiseAbs().sum() <= r) {
    return ProjectionResult{v, false};
  }
  if (r == 0.0) {
    return ProjectionResult{Vector::Zero(d), true};
  }
  // Sort |v| descending and find the threshold theta with
  // sum_i max(|v_i| - theta, 0) = r.
  Vector a = v.cwiseAbs();
  std::sort(a.data(), a.data() + d, std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index i = 0; i < d; ++i) {
    cumsum += a[i];
    const double cand = (cumsum - r) / static_cast<double>(i + 1);
    if (i + 1 == d || a[i + 1] <= cand) {
      theta = cand;
      break;
    }
  }
  Vector out(d);
  for (Index i = 0; i < d; ++i) {
    const double mag = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] < 0.0 ? -mag : mag;
  }
  return ProjectionResult{out, true};
}

ProjectionResult project_transformed_l1(const Vector& v, const Matrix& phi, double r) {
  if (phi.rows() != phi.cols() || phi.cols() != v.size()) {
    throw dimension_error("phi shape does not match the input vector");
  }
  const double dev = (phi.transpose() * phi - Matrix::Identity(phi.rows(), phi.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument("phi is not orthogonal (max deviation " +
                                std::to_string(dev) + ")");
  }
  ProjectionResult inner = project_l1(phi * v, r);
  if (!inner.active) return ProjectionResult{v, false};
  return ProjectionResult{phi.transpose() * inner.point, true};
}

namespace {

ProjectionResult project_nuclear_jacobi(const Matrix& X, double r) {
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("SVD failed in nuclear projection");
  }
  const Vector& sv = svd.singularValues();
  if (sv.sum() <= r) {
    return ProjectionResult{X, false};
  }
  // Threshold only shrinks, so the projected values stay nonnegative.
  ProjectionResult proj = project_l1(sv, r);
  Matrix out = svd.matrixU() * proj.point.asDiagonal() * svd.matrixV().transpose();
  return ProjectionResult{std::move(out), true};
}

}  // namespace

ProjectionResult project_nuclear(const Matrix& X, double r) {
  if (r < 0.0) throw std::invalid_argument("nuclear radius must be nonnegative");
  // Fast path: singular values via an eigendecomposition of the Gram matrix of
  // the smaller side. This is several times faster than a Jacobi SVD for the
  // small dense matrices this solver projects every inner iteration. The Gram
  // route loses relative accuracy on singular values far below the largest, so
  // fall back to the Jacobi SVD whenever the threshold keeps such a value.
  const bool tall = X.rows() >= X.cols();
  const Matrix gram = tall ? Matrix(X.transpose() * X) : Matrix(X * X.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    return project_nuclear_jacobi(X, r);
  }
  const Index p = gram.rows();
  // Eigenvalues come back ascending; flip to the descending order of singular
  // values.
  Vector sv(p);
  for (Index i = 0; i < p; ++i) {
    sv[i] = std::sqrt(std::max(eig.eigenvalues()[p - 1 - i], 0.0));
  }
  if (sv.sum() <= r) {
    return ProjectionResult{X, false};
  }
  ProjectionResult proj = project_l1(sv, r);
  Index kept = 0;
  while (kept < p && proj.point(kept, 0) > 0.0) ++kept;
  const double sv_max = sv[0];
  if (kept == 0) {
    return ProjectionResult{Matrix::Zero(X.rows(), X.cols()), true};
  }
  if (sv[kept - 1] < 1e-6 * sv_max) {
    return project_nuclear_jacobi(X, r);
  }
  // With only one factor needed, the projection is X * W (or W * X) where W is
  // the rank-`kept` rescaling of the Gram eigenvectors: W = V diag(s'/s) V^T.
  Vector scale(kept);
  for (Index i = 0; i < kept; ++i) scale[i] = proj.point(i, 0) / sv[i];
  Matrix V(p, kept);
  for (Index i = 0; i < kept; ++i) V.col(i) = eig.eigenvectors().col(p - 1 - i);
  const Matrix W = V * scale.asDiagonal() * V.transpose();
  Matrix out = tall ? Matrix(X * W) : Matrix(W * X);
  return ProjectionResult{std::move(out), true};
}

ProjectionResult project(const ConstraintSet& c, const Matrix& v) {
  switch (c.kind) {
    case ConstraintKind::Unconstrained:
      return ProjectionResult{v, false};
    case ConstraintKind::L1Ball:
      if (v.cols() != 1) throw dimension_error("l1 constraint expects a vector");
      return project_l1(v.col(0), c.radius);
    case ConstraintKind::TransformedL1Ball:
      if (v.cols() != 1) throw dimension_error("transformed l1 constraint expects a vector");
      return project_transformed_l1(v.col(0), c.phi, c.radius);
    case ConstraintKind::NuclearBall:
      if (v.rows() != c.var_rows || v.cols() != c.var_cols) {
        throw dimension_error("variable shape does not match the nuclear constraint");
      }
      return project_nuclear(v, c.radius);
  }
  return ProjectionResult{v, false};
}

}  // namespace sketchls
