#include "sketchls/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "sketchls/projections.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

namespace {

using clock_type = std::chrono::steady_clock;

// Wall clock covering solver compute only; paused around instrumentation.
class RunClock {
 public:
  void resume() {
    if (!running_) {
      start_ = clock_type::now();
      running_ = true;
    }
  }
  void pause() {
    if (running_) {
      total_ += std::chrono::duration<double>(clock_type::now() - start_).count();
      running_ = false;
    }
  }
  double seconds() const {
    double t = total_;
    if (running_) {
      t += std::chrono::duration<double>(clock_type::now() - start_).count();
    }
    return t;
  }

 private:
  clock_type::time_point start_;
  double total_ = 0.0;
  bool running_ = false;
};

struct Engine {
  const LSProblem& p;
  Budgets budgets;
  RunClock clock;
  IterateTrace trace;
  double epochs = 0.0;
  bool done = false;

  explicit Engine(const LSProblem& problem, const Budgets& b) : p(problem), budgets(b) {}

  void charge(const EpochEvent& e) { epochs += epoch_account(e); }

  // Budget check; marks the trace truncated when a budget has expired.
  bool should_stop() {
    if (done) return true;
    if (epochs >= budgets.epoch_budget || clock.seconds() >= budgets.time_budget) {
      trace.truncated = true;
      return true;
    }
    return false;
  }

  void record(int t, int i, const Matrix& x, double step, bool restarted, int evals) {
    clock.pause();
    TraceRecord rec;
    rec.t = t;
    rec.i = i;
    rec.epochs = epochs;
    rec.wall_seconds = clock.seconds();
    rec.objective = objective(p, x);
    if (budgets.f_star) {
      rec.rel_error = relative_error_from_value(rec.objective, *budgets.f_star).value;
      if (rec.rel_error < budgets.rel_error_target) done = true;
    }
    rec.step = step;
    rec.restarted = restarted;
    rec.func_evals = evals;
    trace.records.push_back(rec);
    clock.resume();
  }
};

// Objective handle used by the shared inner loop: fused value+gradient plus a
// value-only evaluation for line-search candidates.
struct InnerObjective {
  std::function<std::pair<double, Matrix>(const Matrix&)> value_grad;
  std::function<double(const Matrix&)> value;
  EpochEvent::Kind pass_kind = EpochEvent::SketchedPass;
};

struct InnerParams {
  int t_index = 0;
  int iterations = 0;
  bool accelerate = false;
  bool restart = false;
  double fixed_eta = 0.0;  // Fixed policy only
  Index sketch_m = 0;      // for sketched-pass accounting
};

// Projected-gradient inner loop with optional Nesterov extrapolation and
// gradient restart. eta_prev carries the accepted line-search step across
// calls. x is updated in place.
void inner_loop(Engine& eng, const InnerObjective& obj, const ConstraintSet& K,
                const StepPolicy& step, const InnerParams& params, Matrix& x,
                double& eta_prev) {
  const EpochEvent unit_ev{obj.pass_kind, eng.p.n(), params.sketch_m, 0};
  Matrix z = x;
  double tau = 1.0;
  for (int i = 1; i <= params.iterations; ++i) {
    if (eng.should_stop()) return;
    auto [fz, grad] = obj.value_grad(z);
    eng.charge(unit_ev);
    Matrix x_next;
    double eta_used = 0.0;
    int evals = 0;
    if (step.kind == StepPolicyKind::Fixed) {
      eta_used = params.fixed_eta;
      x_next = project(K, z - eta_used * grad).point;
    } else {
      LineSearchResult ls = line_search(obj.value, K, z, fz, grad, eta_prev,
                                        step.gamma_u, step.gamma_d);
      // First candidate evaluation is folded into the gradient's pass.
      for (int e = 1; e < ls.evals; ++e) eng.charge(unit_ev);
      x_next = std::move(ls.x_next);
      eta_prev = ls.eta;
      eta_used = ls.eta;
      evals = ls.evals;
    }
    bool restarted = false;
    if (params.accelerate) {
      if (params.restart && gradient_restart(grad, x_next, x)) {
        tau = 1.0;
        z = x_next;
        restarted = true;
      } else {
        const double tau_next = (1.0 + std::sqrt(1.0 + 4.0 * tau * tau)) / 2.0;
        z = x_next + ((tau - 1.0) / tau_next) * (x_next - x);
        tau = tau_next;
      }
    } else {
      z = x_next;
    }
    x = x_next;
    eng.record(params.t_index, i, x, eta_used, restarted, evals);
  }
}

// 1 / ||M||_2^2 with a small safety margin so the fixed step never exceeds
// the exact 1/L of the sketched quadratic.
double auto_fixed_step(const Matrix& M) {
  return 1.0 / (spectral_norm_sq(M, 1e-4, 500) * (1.0 + 1e-3));
}

double line_search_init_step(const Matrix& M) {
  return 1.0 / spectral_norm_sq(M, 0.0, 20);
}

void validate_config(const LSProblem& p, const SolverConfig& cfg) {
  p.check();
  if (cfg.m < 1) throw std::invalid_argument("sketch size must be positive");
  if (cfg.N < 1 || cfg.k < 1) throw std::invalid_argument("N and k must be at least 1");
  if (cfg.step.kind == StepPolicyKind::LineSearch &&
      (cfg.step.gamma_u <= 1.0 || cfg.step.gamma_d < 1.0)) {
    throw std::invalid_argument("line search requires gamma_u > 1 and gamma_d >= 1");
  }
  if (cfg.step.kind == StepPolicyKind::Fixed && cfg.step.eta < 0.0) {
    throw std::invalid_argument("fixed step must be nonnegative");
  }
}

SolveResult run_gpis(const LSProblem& p, const SolverConfig& cfg, bool accelerate) {
  validate_config(p, cfg);
  Engine eng(p, cfg.budgets);
  Matrix x = Matrix::Zero(p.d(), p.q());
  double eta_prev = 0.0;
  const bool ls = cfg.step.kind == StepPolicyKind::LineSearch;
  eng.clock.resume();

  if (cfg.run_gpcs && cfg.k0 > 0 && !eng.should_stop()) {
    SketchOperator s0 = make_sketch(cfg.sketch, cfg.m, p.n(), cfg.seed);
    auto [As, ys] = sketch_problem_cs(p, s0);
    eng.charge({EpochEvent::SketchBuild, p.n(), cfg.m, 0});
    SketchedSubproblem sp = SketchedSubproblem::gpcs(std::move(As), std::move(ys));
    InnerObjective obj;
    obj.value_grad = [&sp](const Matrix& v) { return sp.value_gradient(v); };
    obj.value = [&sp](const Matrix& v) { return sp.value(v); };
    obj.pass_kind = EpochEvent::SketchedPass;
    InnerParams params{0, cfg.k0, accelerate, cfg.restart, 0.0, cfg.m};
    if (ls) {
      if (eta_prev == 0.0) {
        eta_prev = cfg.step.eta_init > 0.0 ? cfg.step.eta_init
                                           : line_search_init_step(sp.As);
      }
    } else {
      params.fixed_eta = cfg.step.eta > 0.0 ? cfg.step.eta : auto_fixed_step(sp.As);
    }
    inner_loop(eng, obj, p.constraint, cfg.step, params, x, eta_prev);
  }

  for (int t = 1; t <= cfg.N; ++t) {
    if (eng.should_stop()) break;
    Matrix g = full_gradient(p, x);
    eng.charge({EpochEvent::FullPass, p.n(), 0, 0});
    SketchOperator st = make_sketch(cfg.sketch, cfg.m, p.n(),
                                    cfg.seed + static_cast<std::uint64_t>(t));
    Matrix As = st.apply(p.A);
    eng.charge({EpochEvent::SketchBuild, p.n(), cfg.m, 0});
    SketchedSubproblem sp = SketchedSubproblem::gpihs(
        std::move(As), x, std::move(g), static_cast<double>(cfg.m));
    InnerObjective obj;
    obj.value_grad = [&sp](const Matrix& v) { return sp.value_gradient(v); };
    obj.value = [&sp](const Matrix& v) { return sp.value(v); };
    obj.pass_kind = EpochEvent::SketchedPass;
    InnerParams params{t, cfg.k, accelerate, cfg.restart, 0.0, cfg.m};
    if (ls) {
      if (eta_prev == 0.0) {
        eta_prev = cfg.step.eta_init > 0.0 ? cfg.step.eta_init
                                           : line_search_init_step(sp.As);
      }
    } else {
      params.fixed_eta = cfg.step.eta > 0.0 ? cfg.step.eta : auto_fixed_step(sp.As);
    }
    inner_loop(eng, obj, p.constraint, cfg.step, params, x, eta_prev);
  }

  eng.clock.pause();
  return SolveResult{std::move(x), std::move(eng.trace)};
}

}  // namespace

SketchedSubproblem SketchedSubproblem::gpcs(Matrix As, Matrix ys) {
  SketchedSubproblem sp;
  sp.phase = Phase::GPCS;
  sp.As = std::move(As);
  sp.ys = std::move(ys);
  sp.m = static_cast<double>(sp.As.rows());
  return sp;
}

SketchedSubproblem SketchedSubproblem::gpihs(Matrix As, Matrix anchor, Matrix g,
                                             double m) {
  SketchedSubproblem sp;
  sp.phase = Phase::GPIHS;
  sp.As = std::move(As);
  sp.anchor = std::move(anchor);
  sp.g = std::move(g);
  sp.m = m;
  return sp;
}

double SketchedSubproblem::value(const Matrix& x) const {
  if (x.rows() != As.cols()) throw dimension_error("subproblem variable shape mismatch");
  if (phase == Phase::GPCS) {
    return 0.5 * (As * x - ys).squaredNorm();
  }
  return 0.5 * (As * (x - anchor)).squaredNorm() + m * x.cwiseProduct(g).sum();
}

Matrix SketchedSubproblem::gradient(const Matrix& x) const {
  if (x.rows() != As.cols()) throw dimension_error("subproblem variable shape mismatch");
  if (phase == Phase::GPCS) {
    return As.transpose() * (As * x - ys);
  }
  return As.transpose() * (As * (x - anchor)) + m * g;
}

std::pair<double, Matrix> SketchedSubproblem::value_gradient(const Matrix& x) const {
  if (x.rows() != As.cols()) throw dimension_error("subproblem variable shape mismatch");
  if (phase == Phase::GPCS) {
    Matrix res = As * x - ys;
    return {0.5 * res.squaredNorm(), As.transpose() * res};
  }
  Matrix w = As * (x - anchor);
  double val = 0.5 * w.squaredNorm() + m * x.cwiseProduct(g).sum();
  return {val, Matrix(As.transpose() * w + m * g)};
}

double subproblem_value(const SketchedSubproblem& sp, const Matrix& x) {
  return sp.value(x);
}

LineSearchResult line_search(const std::function<double(const Matrix&)>& f,
                             const ConstraintSet& constraint, const Matrix& x_i,
                             double f_i, const Matrix& grad_i, double eta_prev,
                             double gamma_u, double gamma_d) {
  if (eta_prev <= 0.0) throw std::invalid_argument("eta_prev must be positive");
  if (gamma_u <= 1.0) throw std::invalid_argument("gamma_u must exceed 1");
  if (gamma_d < 1.0) throw std::invalid_argument("gamma_d must be at least 1");
  if (grad_i.norm() <= 1e-14 * (1.0 + x_i.norm())) {
    // Stationary point: the strict acceptance test would loop forever.
    return LineSearchResult{x_i, gamma_d * eta_prev, 0, f_i, f_i};
  }
  double eta = gamma_d * eta_prev;
  int evals = 0;
  for (;;) {
    if (eta < 1e-300) {
      throw line_search_error("step size underflow; gradient inconsistent with objective");
    }
    Matrix x = project(constraint, x_i - eta * grad_i).point;
    const Matrix diff = x - x_i;
    if (diff.norm() <= 1e-15 * (1.0 + x_i.norm())) {
      // The projected step collapsed onto x_i (constrained stationarity up to
      // rounding); the strict test can never pass, so stop here.
      return LineSearchResult{x_i, eta, evals, f_i, f_i};
    }
    const double fx = f(x);
    ++evals;
    const double model =
        f_i + diff.cwiseProduct(grad_i).sum() + diff.squaredNorm() / (2.0 * eta);
    if (fx < model) {
      return LineSearchResult{std::move(x), eta, evals, fx, model};
    }
    eta /= gamma_u;
  }
}

bool gradient_restart(const Matrix& grad_at_z, const Matrix& x_next,
                      const Matrix& x_curr) {
  if (grad_at_z.rows() != x_next.rows() || grad_at_z.cols() != x_next.cols() ||
      x_next.rows() != x_curr.rows() || x_next.cols() != x_curr.cols()) {
    throw dimension_error("gradient restart shape mismatch");
  }
  return grad_at_z.cwiseProduct(x_next - x_curr).sum() > 0.0;
}

SolveResult gpis(const LSProblem& p, const SolverConfig& cfg) {
  return run_gpis(p, cfg, false);
}

SolveResult acc_gpis(const LSProblem& p, const SolverConfig& cfg) {
  return run_gpis(p, cfg, true);
}

SolveResult accelerated_pgd(const LSProblem& p, const StepPolicy& step, bool restart,
                            const Budgets& budgets, bool accelerate) {
  p.check();
  Engine eng(p, budgets);
  Matrix x = Matrix::Zero(p.d(), p.q());
  eng.clock.resume();
  InnerObjective obj;
  obj.value_grad = [&p](const Matrix& v) {
    Matrix res = p.A * v - p.y;
    return std::pair<double, Matrix>{0.5 * res.squaredNorm(),
                                     Matrix(p.A.transpose() * res)};
  };
  obj.value = [&p](const Matrix& v) { return objective(p, v); };
  obj.pass_kind = EpochEvent::FullPass;
  InnerParams params{0, 1 << 30, accelerate, restart, 0.0, 0};
  double eta_prev = 0.0;
  if (step.kind == StepPolicyKind::LineSearch) {
    eta_prev = step.eta_init > 0.0 ? step.eta_init : line_search_init_step(p.A);
  } else {
    params.fixed_eta = step.eta > 0.0 ? step.eta : auto_fixed_step(p.A);
  }
  inner_loop(eng, obj, p.constraint, step, params, x, eta_prev);
  eng.clock.pause();
  return SolveResult{std::move(x), std::move(eng.trace)};
}

SolveResult saga_minibatch(const LSProblem& p, Index batch, const Budgets& budgets,
                           std::uint64_t seed, SagaDiag* diag) {
  p.check();
  const Index n = p.n();
  if (batch < 1 || batch > n) throw std::invalid_argument("batch must be in [1, n]");
  const Index B = (n + batch - 1) / batch;
  std::vector<Index> starts(static_cast<std::size_t>(B));
  std::vector<Index> lens(static_cast<std::size_t>(B));
  for (Index j = 0; j < B; ++j) {
    starts[static_cast<std::size_t>(j)] = j * batch;
    lens[static_cast<std::size_t>(j)] = std::min(batch, n - j * batch);
  }

  // Step 1/(3 L_hat), L_hat = mean of the squared top singular value of each
  // batch block; estimation is excluded from the epoch and wall accounting.
  double lhat = 0.0;
  for (Index j = 0; j < B; ++j) {
    lhat += spectral_norm_sq(
        p.A.middleRows(starts[static_cast<std::size_t>(j)],
                       lens[static_cast<std::size_t>(j)]),
        1e-6, 200);
  }
  lhat /= static_cast<double>(B);
  const double eta = 1.0 / (3.0 * lhat);

  Engine eng(p, budgets);
  Matrix x = Matrix::Zero(p.d(), p.q());
  eng.clock.resume();

  std::vector<Matrix> table(static_cast<std::size_t>(B));
  Matrix avg = Matrix::Zero(p.d(), p.q());
  for (Index j = 0; j < B; ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    const auto Aj = p.A.middleRows(starts[jj], lens[jj]);
    const auto yj = p.y.middleRows(starts[jj], lens[jj]);
    table[jj] = Aj.transpose() * (Aj * x - yj);
    avg += table[jj];
  }
  avg /= static_cast<double>(B);
  eng.charge({EpochEvent::FullPass, n, 0, 0});

  Rng rng(seed);
  const long record_every = std::max<long>(1, static_cast<long>(B / 8));
  for (long iter = 1;; ++iter) {
    if (eng.should_stop()) break;
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(B)));
    const auto Aj = p.A.middleRows(starts[j], lens[j]);
    const auto yj = p.y.middleRows(starts[j], lens[j]);
    Matrix gj = Aj.transpose() * (Aj * x - yj);
    eng.charge({EpochEvent::SagaBatch, n, 0, lens[j]});
    Matrix dir = gj - table[j] + avg;
    x = project(p.constraint, x - eta * dir).point;
    avg += (gj - table[j]) / static_cast<double>(B);
    table[j] = std::move(gj);
    if (diag != nullptr && iter % B == 0) {
      // One refresh cycle: the running average must still equal the exact
      // mean of the stored gradients.
      Matrix exact = Matrix::Zero(p.d(), p.q());
      for (const Matrix& t : table) exact += t;
      exact /= static_cast<double>(B);
      diag->max_average_residual =
          std::max(diag->max_average_residual, (exact - avg).norm());
      ++diag->refresh_checks;
    }
    if (iter % record_every == 0) {
      eng.record(0, static_cast<int>(iter), x, eta, false, 0);
    }
  }
  eng.clock.pause();
  return SolveResult{std::move(x), std::move(eng.trace)};
}

double epoch_account(const EpochEvent& event) {
  switch (event.kind) {
    case EpochEvent::FullPass:
    case EpochEvent::SketchBuild:
      return 1.0;
    case EpochEvent::SketchedPass:
      if (event.n < 1 || event.m < 1) throw std::invalid_argument("need m and n");
      return static_cast<double>(event.m) / static_cast<double>(event.n);
    case EpochEvent::SagaBatch:
      if (event.n < 1 || event.b < 1) throw std::invalid_argument("need b and n");
      return static_cast<double>(event.b) / static_cast<double>(event.n);
    case EpochEvent::Projection:
      return 0.0;
  }
  return 0.0;
}

const char* IterateTrace::csv_header() {
  return "t,i,epochs,wall_seconds,objective,rel_error,step,restarted,func_evals";
}

void IterateTrace::write_csv(std::ostream& os, bool include_wall) const {
  os << csv_header() << "\n";
  char buf[512];
  for (const TraceRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                  r.t, r.i, r.epochs, include_wall ? r.wall_seconds : 0.0,
                  r.objective, r.rel_error, r.step, r.restarted ? 1 : 0,
                  r.func_evals);
    os << buf;
  }
}

double IterateTrace::final_epochs() const {
  return records.empty() ? 0.0 : records.back().epochs;
}

double IterateTrace::final_wall() const {
  return records.empty() ? 0.0 : records.back().wall_seconds;
}

}  // namespace sketchls
