#ifndef SKETCHLS_SOLVERS_HPP
#define SKETCHLS_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "sketchls/problem.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

enum class StepPolicyKind { Fixed, LineSearch };

struct StepPolicy {
  StepPolicyKind kind = StepPolicyKind::Fixed;
  double eta = 0.0;       // Fixed: 0 means auto 1/||S^t A||_2^2 per outer loop
  double gamma_u = 2.0;   // backtracking shrink factor, > 1
  double gamma_d = 2.0;   // step growth factor between iterations, >= 1
  double eta_init = 0.0;  // LineSearch: 0 means auto from the first sketch

  static StepPolicy fixed(double eta = 0.0) {
    return StepPolicy{StepPolicyKind::Fixed, eta, 2.0, 2.0, 0.0};
  }
  static StepPolicy line_search(double gamma_u = 2.0, double gamma_d = 2.0,
                                double eta_init = 0.0) {
    return StepPolicy{StepPolicyKind::LineSearch, 0.0, gamma_u, gamma_d, eta_init};
  }
};

struct Budgets {
  double epoch_budget = std::numeric_limits<double>::infinity();
  double time_budget = std::numeric_limits<double>::infinity();  // seconds
  double rel_error_target = 1e-14;
  std::optional<double> f_star;  // enables rel_error in traces and the target stop
};

struct SolverConfig {
  Index m = 0;               // sketch size
  SketchKind sketch = SketchKind::Count;
  bool run_gpcs = false;
  int k0 = 0;                // classical-sketch inner iterations
  int N = 1;                 // outer loops
  int k = 1;                 // inner iterations per outer loop
  StepPolicy step;
  bool restart = true;       // gradient restart (accelerated variant only)
  std::uint64_t seed = 0;    // sketch for loop t uses seed + t
  Budgets budgets;
};

struct TraceRecord {
  int t = 0;
  int i = 0;
  double epochs = 0.0;
  double wall_seconds = 0.0;
  double objective = 0.0;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double step = 0.0;
  bool restarted = false;
  int func_evals = 0;
};

struct IterateTrace {
  std::vector<TraceRecord> records;
  bool truncated = false;  // a budget expired before the target was reached

  static const char* csv_header();  // "t,i,epochs,...,func_evals"
  void write_csv(std::ostream& os, bool include_wall = true) const;
  double final_epochs() const;
  double final_wall() const;
};

struct SolveResult {
  Matrix x;
  IterateTrace trace;
};

// One sketched subproblem. GPCS phase: f(x) = (1/2)||As x - ys||^2.
// GPIHS phase: f(x) = (1/2)||As (x - anchor)||^2 + m <x, g> with
// g the full gradient at the anchor.
struct SketchedSubproblem {
  enum class Phase { GPCS, GPIHS };
  Phase phase = Phase::GPIHS;
  Matrix As;
  Matrix ys;      // GPCS only
  Matrix anchor;  // GPIHS only
  Matrix g;       // GPIHS only
  double m = 0.0;

  static SketchedSubproblem gpcs(Matrix As, Matrix ys);
  static SketchedSubproblem gpihs(Matrix As, Matrix anchor, Matrix g, double m);

  double value(const Matrix& x) const;
  Matrix gradient(const Matrix& x) const;
  std::pair<double, Matrix> value_gradient(const Matrix& x) const;
};

double subproblem_value(const SketchedSubproblem& sp, const Matrix& x);

struct LineSearchResult {
  Matrix x_next;
  double eta = 0.0;
  int evals = 0;         // candidate objective evaluations
  double f_next = 0.0;
  double model_value = 0.0;  // m_L at the accepted point; f_next < model_value
};

// Backtracking scheme: start at gamma_d * eta_prev, shrink by gamma_u while
// f(x) >= f_i + <x - x_i, grad_i> + ||x - x_i||^2 / (2 eta). Zero gradients
// return x_i immediately. Throws line_search_error on step underflow.
LineSearchResult line_search(const std::function<double(const Matrix&)>& f,
                             const ConstraintSet& constraint, const Matrix& x_i,
                             double f_i, const Matrix& grad_i, double eta_prev,
                             double gamma_u, double gamma_d);

// True iff grad_at_z^T (x_next - x_curr) > 0; the caller then resets momentum.
bool gradient_restart(const Matrix& grad_at_z, const Matrix& x_next,
                      const Matrix& x_curr);

SolveResult gpis(const LSProblem& p, const SolverConfig& cfg);
SolveResult acc_gpis(const LSProblem& p, const SolverConfig& cfg);

// Full-gradient projected descent; accelerate=true gives the Nesterov variant
// with optional gradient restart.
SolveResult accelerated_pgd(const LSProblem& p, const StepPolicy& step, bool restart,
                            const Budgets& budgets, bool accelerate = true);

// Bookkeeping diagnostics: every full refresh cycle (one pass worth of
// iterations) the running stored-gradient average is compared against the
// exact mean of the table.
struct SagaDiag {
  int refresh_checks = 0;
  double max_average_residual = 0.0;
};

SolveResult saga_minibatch(const LSProblem& p, Index batch, const Budgets& budgets,
                           std::uint64_t seed, SagaDiag* diag = nullptr);

// Epoch accounting: a full n-row pass costs 1 epoch, building S^t A costs 1,
// a sketched pass costs m/n, a SAGA step with batch b costs b/n, projections
// cost 0. Line searches fold the first candidate evaluation into the
// gradient's pass; only extra candidates are charged.
struct EpochEvent {
  enum Kind { FullPass, SketchBuild, SketchedPass, SagaBatch, Projection };
  Kind kind = FullPass;
  Index n = 0;
  Index m = 0;
  Index b = 0;
};

double epoch_account(const EpochEvent& event);

}  // namespace sketchls

#endif
