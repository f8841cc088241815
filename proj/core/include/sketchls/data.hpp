#ifndef SKETCHLS_DATA_HPP
#define SKETCHLS_DATA_HPP

#include <cstdint>
#include <string>

#include "sketchls/problem.hpp"

namespace sketchls {

// Synthetic problem recipe: Gaussian matrix, SVD, geometric singular-value
// sequence targeting condition number kappa^((d-1)/d), sparse (or low-rank)
// ground truth, noise scaled to ||A x_gt|| / ||w|| = snr.
struct SynthSpec {
  Index n = 0;
  Index d = 0;
  Index s = 0;          // sparsity (vector case) or rank (low-rank case)
  double kappa = 1.0;
  bool transformed = false;  // sparse in a random orthogonal dictionary
  Index q = 1;          // response columns (low-rank case)
  double snr = 10.0;
  std::uint64_t seed = 0;
};

enum class OracleMethod { NormalEquations, LongRunAccPGD };

struct Oracle {
  Matrix x_star;
  double f_star = 0.0;
  OracleMethod method = OracleMethod::NormalEquations;
  double certificate = 0.0;  // terminal gradient-map norm
};

struct GeneratedProblem {
  LSProblem problem;
  Matrix x_gt;
  Oracle oracle;
};

GeneratedProblem gen_synthetic(const SynthSpec& spec, bool with_oracle = true,
                               double oracle_tol = 1e-12);

GeneratedProblem gen_lowrank(const SynthSpec& spec, bool with_oracle = true,
                             double oracle_tol = 1e-12);

// Reads a numeric CSV (last column is the target unless target_col >= 0),
// keeps the first `relevant` feature columns (all when relevant <= 0),
// appends `irrelevant` standard-normal columns, normalizes every feature
// column to unit Euclidean norm, and sets an l1 constraint whose radius is
// the l1 norm of the unconstrained solution of the relevant-only problem.
LSProblem load_regression_csv(const std::string& path, Index relevant,
                              Index irrelevant, std::uint64_t seed,
                              Index target_col = -1);

// Reference solution. Unconstrained problems use a direct (minimum-norm)
// least-squares solve; constrained ones a long accelerated projected-gradient
// run with restart, plus an exact active-set polish for l1 constraints. The
// certificate is the projected-gradient-map norm at step 1/L, and must
// satisfy certificate <= tol * (1 + f_star) or oracle_error is thrown.
Oracle oracle_solution(const LSProblem& p, double tol = 1e-12);

}  // namespace sketchls

#endif
