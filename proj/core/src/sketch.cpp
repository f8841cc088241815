#include "sketchls/sketch.hpp"

#include <cmath>
#include <utility>

#include "sketchls/rng.hpp"

namespace sketchls {

SketchOperator SketchOperator::gaussian(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sketch dimensions must be positive");
  SketchOperator s;
  s.kind_ = SketchKind::Gaussian;
  s.m_ = m;
  s.n_ = n;
  s.S_.resize(m, n);
  Rng rng(seed);
  // Row-major fill so the stream order is independent of Eigen's storage.
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) s.S_(i, j) = rng.normal();
  return s;
}

SketchOperator SketchOperator::count(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sketch dimensions must be positive");
  if (m > n) throw std::invalid_argument("count sketch requires m <= n");
  SketchOperator s;
  s.kind_ = SketchKind::Count;
  s.m_ = m;
  s.n_ = n;
  s.bucket_.resize(static_cast<std::size_t>(n));
  s.sign_.resize(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    s.bucket_[static_cast<std::size_t>(i)] =
        static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(m)));
    s.sign_[static_cast<std::size_t>(i)] = rng.coin() ? 1.0 : -1.0;
  }
  return s;
}

SketchOperator SketchOperator::count_explicit(std::vector<Index> bucket,
                                              std::vector<double> sign, Index m) {
  if (m < 1 || bucket.empty() || bucket.size() != sign.size()) {
    throw std::invalid_argument("inconsistent explicit count sketch");
  }
  for (Index b : bucket) {
    if (b < 0 || b >= m) throw std::invalid_argument("bucket index out of range");
  }
  SketchOperator s;
  s.kind_ = SketchKind::Count;
  s.m_ = m;
  s.n_ = static_cast<Index>(bucket.size());
  s.bucket_ = std::move(bucket);
  s.sign_ = std::move(sign);
  return s;
}

Matrix SketchOperator::apply(const Matrix& M) const {
  if (M.rows() != n_) {
    throw dimension_error("sketch expects " + std::to_string(n_) + " rows, got " +
                          std::to_string(M.rows()));
  }
  if (kind_ == SketchKind::Gaussian) {
    return S_ * M;
  }
  // One streaming pass: row i of M is sign-scaled and accumulated into
  // output row bucket(i). Entries carry sqrt(m) so that E(S^T S / m) = I.
  const double scale = std::sqrt(static_cast<double>(m_));
  Matrix out = Matrix::Zero(m_, M.cols());
  for (Index i = 0; i < n_; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    out.row(bucket_[ii]) += (sign_[ii] * scale) * M.row(i);
  }
  return out;
}

Matrix SketchOperator::dense() const {
  if (kind_ == SketchKind::Gaussian) return S_;
  Matrix S = Matrix::Zero(m_, n_);
  const double scale = std::sqrt(static_cast<double>(m_));
  for (Index i = 0; i < n_; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    S(bucket_[ii], i) = sign_[ii] * scale;
  }
  return S;
}

SketchOperator make_sketch(SketchKind kind, Index m, Index n, std::uint64_t seed) {
  return kind == SketchKind::Gaussian ? SketchOperator::gaussian(m, n, seed)
                                      : SketchOperator::count(m, n, seed);
}

std::pair<Matrix, Matrix> sketch_problem_cs(const LSProblem& p, const SketchOperator& s) {
  if (s.cols() != p.n()) {
    throw dimension_error("sketch ambient dimension does not match the problem");
  }
  return {s.apply(p.A), s.apply(p.y)};
}

}  // namespace sketchls
