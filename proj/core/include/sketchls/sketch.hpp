#ifndef SKETCHLS_SKETCH_HPP
#define SKETCHLS_SKETCH_HPP

#include <cstdint>
#include <vector>

#include "sketchls/problem.hpp"

namespace sketchls {

enum class SketchKind { Gaussian, Count };

// Random m x n projection normalized so that E(S^T S / m) = I.
//   Gaussian: dense i.i.d. N(0,1) entries.
//   Count:    one nonzero per column, sign * sqrt(m), stored as a bucket
//             index and a sign per input row; applied in one streaming pass.
class SketchOperator {
 public:
  static SketchOperator gaussian(Index m, Index n, std::uint64_t seed);
  static SketchOperator count(Index m, Index n, std::uint64_t seed);
  // Test hook: Count operator with explicit buckets/signs.
  static SketchOperator count_explicit(std::vector<Index> bucket,
                                       std::vector<double> sign, Index m);

  // S * M for M with n rows. Count never materializes S.
  Matrix apply(const Matrix& M) const;

  // Materialized S (intended for tests; O(m n) memory for Count).
  Matrix dense() const;

  SketchKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index cols() const { return n_; }
  const std::vector<Index>& buckets() const { return bucket_; }
  const std::vector<double>& signs() const { return sign_; }

 private:
  SketchOperator() = default;
  SketchKind kind_ = SketchKind::Gaussian;
  Index m_ = 0;
  Index n_ = 0;
  Matrix S_;                   // Gaussian only
  std::vector<Index> bucket_;  // Count only, length n
  std::vector<double> sign_;   // Count only, +-1
};

SketchOperator make_sketch(SketchKind kind, Index m, Index n, std::uint64_t seed);

// (S A, S y) for the Classical Sketch phase.
std::pair<Matrix, Matrix> sketch_problem_cs(const LSProblem& p, const SketchOperator& s);

}  // namespace sketchls

#endif
