// Command-line harness: problem generation, single solver runs, benchmark
// sweeps, convergence-bound diagnostics, and the step-size-vs-sparsity
// experiment. Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sketchls/bundle.hpp"
#include "sketchls/data.hpp"
#include "sketchls/problem.hpp"
#include "sketchls/solvers.hpp"
#include "sketchls/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sketchls;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SKETCHLS_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw CLI::ValidationError("SKETCHLS_SEED is not a valid integer");
  }
  return 0;
}

bool preset_spec(const std::string& name, SynthSpec& spec, bool& lowrank) {
  lowrank = false;
  if (name == "syn1-small") {
    spec.n = 10000; spec.d = 100; spec.s = 10; spec.kappa = 1e4;
    spec.transformed = false;
    return true;
  }
  if (name == "syn2-small") {
    spec.n = 10000; spec.d = 100; spec.s = 10; spec.kappa = 1e4;
    spec.transformed = true;
    return true;
  }
  if (name == "syn3-small") {
    spec.n = 5000; spec.d = 50; spec.s = 5; spec.kappa = 1e4;
    spec.q = 50; lowrank = true;
    return true;
  }
  return false;
}

double condition_number(const LSProblem& p) {
  const SpectralConstants sc = spectral_constants(p, 1e-8);
  return sc.mu > 0.0 ? std::sqrt(sc.L / sc.mu)
                     : std::numeric_limits<double>::infinity();
}

// ---- gen ----------------------------------------------------------------

struct GenOpts {
  std::string preset;
  std::string csv_path;
  std::string output;
  SynthSpec spec{.n = 1000, .d = 50, .s = 5, .kappa = 1e4};
  bool lowrank = false;
  Index relevant = 0;
  Index irrelevant = 0;
  Index target_col = -1;
  std::optional<std::uint64_t> seed;
  double oracle_tol = 1e-12;
};

int run_gen(const GenOpts& opts) {
  Bundle bundle;
  SynthSpec spec = opts.spec;
  bool lowrank = opts.lowrank;
  if (!opts.preset.empty() && !preset_spec(opts.preset, spec, lowrank)) {
    std::cerr << "unknown preset: " << opts.preset << "\n";
    return 2;
  }
  spec.seed = opts.seed.value_or(default_seed());
  bundle.seed = spec.seed;

  if (!opts.csv_path.empty()) {
    bundle.problem = load_regression_csv(opts.csv_path, opts.relevant,
                                         opts.irrelevant, spec.seed, opts.target_col);
    bundle.oracle = oracle_solution(bundle.problem, opts.oracle_tol);
    bundle.source = "csv";
  } else if (lowrank) {
    GeneratedProblem g = gen_lowrank(spec, true, opts.oracle_tol);
    bundle.problem = std::move(g.problem);
    bundle.oracle = std::move(g.oracle);
    bundle.x_gt = std::move(g.x_gt);
    bundle.source = "lowrank";
  } else {
    GeneratedProblem g = gen_synthetic(spec, true, opts.oracle_tol);
    bundle.problem = std::move(g.problem);
    bundle.oracle = std::move(g.oracle);
    bundle.x_gt = std::move(g.x_gt);
    bundle.source = "synthetic";
  }

  save_bundle(opts.output, bundle);
  std::cout << "cond(A) = " << condition_number(bundle.problem) << "\n"
            << "radius  = " << bundle.problem.constraint.radius << "\n"
            << "f_star  = " << bundle.oracle.f_star << "\n"
            << "wrote " << opts.output << "\n";
  return 0;
}

// ---- solve --------------------------------------------------------------

struct SolverSpec {
  std::string name = "acc-gpis";
  Index m = 0;  // 0 = auto 8d (clamped to n)
  int k = 10;
  int N = 20;
  int k0 = -1;  // -1 = same as k
  bool force_gpcs = false;     // default: on unless the bundle came from a CSV
  bool force_no_gpcs = false;
  std::string sketch = "count";
  bool line_search = false;
  double eta = 0.0;
  double gamma_u = 2.0;
  double gamma_d = 2.0;
  bool no_restart = false;
  Index batch = 10;
};

void add_solver_flags(CLI::App* cmd, SolverSpec& s) {
  cmd->add_option("--solver", s.name,
                  "gpis | acc-gpis | pgd | acc-pgd | saga");
  cmd->add_option("--m", s.m, "sketch size (0 = 8d)");
  cmd->add_option("--k", s.k, "inner iterations per outer loop");
  cmd->add_option("--N", s.N, "outer loops");
  cmd->add_option("--k0", s.k0, "warm-start inner iterations (-1 = k)");
  cmd->add_flag("--gpcs", s.force_gpcs, "run the classical-sketch warm start");
  cmd->add_flag("--no-gpcs", s.force_no_gpcs, "skip the classical-sketch warm start");
  cmd->add_option("--sketch", s.sketch, "gaussian | count");
  cmd->add_flag("--line-search", s.line_search, "backtracking line search");
  cmd->add_option("--eta", s.eta, "fixed step (0 = auto per sketch)");
  cmd->add_option("--gamma-u", s.gamma_u, "line-search shrink factor");
  cmd->add_option("--gamma-d", s.gamma_d, "line-search growth factor");
  cmd->add_flag("--no-restart", s.no_restart, "disable gradient restart");
  cmd->add_option("--batch", s.batch, "SAGA minibatch size");
}

SolverConfig to_config(const SolverSpec& s, const LSProblem& p, bool csv_source,
                       std::uint64_t seed, const Budgets& budgets) {
  SolverConfig cfg;
  cfg.m = s.m > 0 ? s.m : std::min<Index>(8 * p.d(), p.n());
  if (s.sketch == "gaussian") {
    cfg.sketch = SketchKind::Gaussian;
  } else if (s.sketch == "count") {
    cfg.sketch = SketchKind::Count;
  } else {
    throw CLI::ValidationError("unknown sketch kind: " + s.sketch);
  }
  cfg.run_gpcs = s.force_no_gpcs ? false : (s.force_gpcs || !csv_source);
  cfg.k = s.k;
  cfg.k0 = s.k0 < 0 ? s.k : s.k0;
  cfg.N = s.N;
  cfg.step = s.line_search ? StepPolicy::line_search(s.gamma_u, s.gamma_d)
                           : StepPolicy::fixed(s.eta);
  cfg.restart = !s.no_restart;
  cfg.seed = seed;
  cfg.budgets = budgets;
  return cfg;
}

SolveResult run_named_solver(const LSProblem& p, const SolverSpec& s,
                             bool csv_source, std::uint64_t seed,
                             const Budgets& budgets) {
  if (s.name == "gpis") {
    return gpis(p, to_config(s, p, csv_source, seed, budgets));
  }
  if (s.name == "acc-gpis") {
    return acc_gpis(p, to_config(s, p, csv_source, seed, budgets));
  }
  if (s.name == "pgd") {
    const StepPolicy step =
        s.line_search ? StepPolicy::line_search(s.gamma_u, s.gamma_d)
                      : StepPolicy::fixed(s.eta);
    return accelerated_pgd(p, step, false, budgets, false);
  }
  if (s.name == "acc-pgd") {
    const StepPolicy step =
        s.line_search ? StepPolicy::line_search(s.gamma_u, s.gamma_d)
                      : StepPolicy::fixed(s.eta);
    return accelerated_pgd(p, step, !s.no_restart, budgets, true);
  }
  if (s.name == "saga") {
    return saga_minibatch(p, s.batch, budgets, seed);
  }
  throw CLI::ValidationError("unknown solver name: " + s.name);
}

json summarize(const std::string& solver, std::uint64_t seed,
               const IterateTrace& trace) {
  json j;
  j["solver"] = solver;
  j["seed"] = seed;
  double final_rel = std::numeric_limits<double>::quiet_NaN();
  json e6 = nullptr, e10 = nullptr, w6 = nullptr;
  for (const TraceRecord& r : trace.records) {
    if (std::isnan(r.rel_error)) continue;
    final_rel = r.rel_error;
    if (e6.is_null() && r.rel_error < 1e-6) {
      e6 = r.epochs;
      w6 = r.wall_seconds;
    }
    if (e10.is_null() && r.rel_error < 1e-10) e10 = r.epochs;
  }
  j["final_rel_error"] = final_rel;
  j["epochs_to_1e-6"] = e6;
  j["epochs_to_1e-10"] = e10;
  j["wall_to_1e-6"] = w6;
  j["exact_recovery"] = !std::isnan(final_rel) && final_rel < 1e-10;
  return j;
}

struct SolveOpts {
  std::string bundle_path;
  SolverSpec solver;
  std::optional<std::uint64_t> seed;
  double epoch_budget = 500.0;
  double time_budget = std::numeric_limits<double>::infinity();
  double target = 1e-14;
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
};

int run_solve(const SolveOpts& opts) {
  const Bundle bundle = load_bundle(opts.bundle_path);
  const std::uint64_t seed = opts.seed.value_or(default_seed());

  Budgets budgets;
  budgets.epoch_budget = opts.epoch_budget;
  budgets.time_budget = opts.time_budget;
  budgets.rel_error_target = opts.target;
  budgets.f_star = bundle.oracle.f_star;

  SolveResult result = run_named_solver(bundle.problem, opts.solver,
                                        bundle.source == "csv", seed, budgets);

  std::ofstream trace_out(opts.trace_path);
  if (!trace_out) throw std::runtime_error("cannot write " + opts.trace_path);
  result.trace.write_csv(trace_out);

  std::ofstream summary_out(opts.summary_path);
  if (!summary_out) throw std::runtime_error("cannot write " + opts.summary_path);
  summary_out << summarize(opts.solver.name, seed, result.trace).dump(2) << "\n";

  std::cout << "final rel_error "
            << (result.trace.records.empty()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : result.trace.records.back().rel_error)
            << " after " << result.trace.final_epochs() << " epochs ("
            << result.trace.final_wall() << " s)"
            << (result.trace.truncated ? " [budget expired]" : "") << "\n";
  return 0;
}

// ---- bench --------------------------------------------------------------

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) { ok = true; break; }
    }
    if (!ok) {
      throw CLI::ValidationError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

SolverSpec solver_spec_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"name", "label", "m", "k", "N", "k0", "gpcs", "sketch",
                       "line_search", "eta", "gamma_u", "gamma_d", "restart",
                       "batch"},
                      "solver entry");
  SolverSpec s;
  s.name = j.at("name").get<std::string>();
  s.m = j.value("m", Index{0});
  s.k = j.value("k", 10);
  s.N = j.value("N", 20);
  s.k0 = j.value("k0", -1);
  if (j.contains("gpcs")) {
    if (j.at("gpcs").get<bool>()) s.force_gpcs = true;
    else s.force_no_gpcs = true;
  }
  s.sketch = j.value("sketch", std::string("count"));
  s.line_search = j.value("line_search", false);
  s.eta = j.value("eta", 0.0);
  s.gamma_u = j.value("gamma_u", 2.0);
  s.gamma_d = j.value("gamma_d", 2.0);
  s.no_restart = !j.value("restart", true);
  s.batch = j.value("batch", Index{10});
  return s;
}

struct BenchTask {
  std::size_t solver_idx;
  std::string label;
  SolverSpec spec;
  std::uint64_t seed;
};

struct BenchOutcome {
  bool failed = false;
  bool stalled = false;
  std::string error;
  IterateTrace trace;
};

int run_bench(const std::string& config_path, int jobs) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open " << config_path << "\n";
    return 2;
  }
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  }

  reject_unknown_keys(cfg,
                      {"version", "problem", "solvers", "budgets", "seeds",
                       "repetitions", "seed", "output_dir"},
                      "config");
  if (cfg.value("version", 0) != 1) {
    throw CLI::ValidationError("config must declare \"version\": 1");
  }
  if (!cfg.contains("solvers") || !cfg.at("solvers").is_array() ||
      cfg.at("solvers").empty()) {
    throw CLI::ValidationError("config needs a nonempty solver list");
  }

  // Problem source: a bundle path, a preset, or inline generator parameters.
  const json& jp = cfg.at("problem");
  reject_unknown_keys(jp,
                      {"bundle", "preset", "n", "d", "s", "kappa", "transformed",
                       "q", "lowrank", "snr", "seed"},
                      "problem");
  Bundle bundle;
  if (jp.contains("bundle")) {
    bundle = load_bundle(jp.at("bundle").get<std::string>());
  } else {
    SynthSpec spec;
    bool lowrank = false;
    if (jp.contains("preset")) {
      if (!preset_spec(jp.at("preset").get<std::string>(), spec, lowrank)) {
        throw CLI::ValidationError("unknown preset in config");
      }
    } else {
      spec.n = jp.at("n").get<Index>();
      spec.d = jp.at("d").get<Index>();
      spec.s = jp.at("s").get<Index>();
      spec.kappa = jp.value("kappa", 1e4);
      spec.transformed = jp.value("transformed", false);
      spec.q = jp.value("q", Index{1});
      lowrank = jp.value("lowrank", false);
    }
    spec.snr = jp.value("snr", 10.0);
    spec.seed = jp.value("seed", default_seed());
    GeneratedProblem g = lowrank ? gen_lowrank(spec) : gen_synthetic(spec);
    bundle.problem = std::move(g.problem);
    bundle.oracle = std::move(g.oracle);
    bundle.source = lowrank ? "lowrank" : "synthetic";
    bundle.seed = spec.seed;
  }

  Budgets budgets;
  budgets.epoch_budget = 200.0;
  budgets.rel_error_target = 1e-12;
  if (cfg.contains("budgets")) {
    const json& jb = cfg.at("budgets");
    reject_unknown_keys(jb, {"epochs", "time", "target"}, "budgets");
    budgets.epoch_budget = jb.value("epochs", budgets.epoch_budget);
    budgets.time_budget = jb.value("time", budgets.time_budget);
    budgets.rel_error_target = jb.value("target", budgets.rel_error_target);
  }
  if (budgets.epoch_budget <= 0.0 || budgets.time_budget <= 0.0 ||
      budgets.rel_error_target <= 0.0) {
    throw CLI::ValidationError("budgets must be positive");
  }
  budgets.f_star = bundle.oracle.f_star;

  std::vector<std::uint64_t> seeds;
  if (cfg.contains("seeds")) {
    seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    const int reps = cfg.value("repetitions", 1);
    if (reps < 1) throw CLI::ValidationError("repetitions must be at least 1");
    const std::uint64_t base = cfg.value("seed", default_seed());
    for (int r = 0; r < reps; ++r) seeds.push_back(base + static_cast<std::uint64_t>(r));
  }
  if (seeds.empty()) throw CLI::ValidationError("need at least one seed");

  const fs::path outdir = cfg.value("output_dir", std::string("bench-out"));
  fs::create_directories(outdir);

  std::vector<BenchTask> tasks;
  std::vector<std::string> labels;
  for (std::size_t si = 0; si < cfg.at("solvers").size(); ++si) {
    const json& js = cfg.at("solvers")[si];
    SolverSpec spec = solver_spec_from_json(js);
    std::string label = js.value("label", spec.name);
    labels.push_back(label);
    for (std::uint64_t seed : seeds) {
      tasks.push_back(BenchTask{si, label, spec, seed});
    }
  }

  std::vector<BenchOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  const bool csv_source = bundle.source == "csv";
  const LSProblem& problem = bundle.problem;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const BenchTask& task = tasks[i];
      BenchOutcome& out = outcomes[i];
      try {
        SolveResult res =
            run_named_solver(problem, task.spec, csv_source, task.seed, budgets);
        out.trace = std::move(res.trace);
        out.stalled = out.trace.truncated;
        const fs::path trace_path =
            outdir / (task.label + "_seed" + std::to_string(task.seed) + "_trace.csv");
        std::ofstream tf(trace_path);
        out.trace.write_csv(tf);
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    }
  };

  const int nthreads = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Long-format CSV across all runs.
  {
    std::ofstream lf(outdir / "long.csv");
    lf << "solver,seed,epochs,wall_seconds,rel_error\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (outcomes[i].failed) continue;
      for (const TraceRecord& r : outcomes[i].trace.records) {
        lf << tasks[i].label << "," << tasks[i].seed << "," << r.epochs << ","
           << r.wall_seconds << "," << r.rel_error << "\n";
      }
    }
  }

  // Median summary per solver.
  auto median = [](std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  std::ofstream sf(outdir / "summary.csv");
  sf << "solver,runs,failures,stalls,median_final_rel_error,median_epochs,"
        "median_wall_seconds\n";
  for (std::size_t si = 0; si < labels.size(); ++si) {
    std::vector<double> rels, epochs, walls;
    int failures = 0, stalls = 0, runs = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].solver_idx != si) continue;
      ++runs;
      if (outcomes[i].failed) {
        ++failures;
        std::cerr << labels[si] << " seed " << tasks[i].seed
                  << " failed: " << outcomes[i].error << "\n";
        continue;
      }
      if (outcomes[i].stalled) ++stalls;
      if (!outcomes[i].trace.records.empty()) {
        rels.push_back(outcomes[i].trace.records.back().rel_error);
        epochs.push_back(outcomes[i].trace.final_epochs());
        walls.push_back(outcomes[i].trace.final_wall());
      }
    }
    sf << labels[si] << "," << runs << "," << failures << "," << stalls << ","
       << median(rels) << "," << median(epochs) << "," << median(walls) << "\n";
  }
  std::cout << "wrote " << (outdir / "long.csv").string() << " and "
            << (outdir / "summary.csv").string() << "\n";
  return 0;
}

// ---- bounds -------------------------------------------------------------

int run_bounds(const std::string& bundle_path, std::vector<Index> sweep,
               double theta, Index sparsity, int k, const std::string& output) {
  const Bundle bundle = load_bundle(bundle_path);
  const LSProblem& p = bundle.problem;
  const SpectralConstants sc = spectral_constants(p, 1e-8);

  Index s = sparsity;
  if (s <= 0 && bundle.x_gt) {
    s = 0;
    const Matrix& xg = *bundle.x_gt;
    const double thresh = 1e-12 * xg.cwiseAbs().maxCoeff();
    for (Index i = 0; i < xg.size(); ++i) {
      if (std::abs(xg.data()[i]) > thresh) ++s;
    }
  }
  if (s <= 0) s = p.d();
  const double W = l1_cone_width(std::min(s, p.d()), p.d());

  if (sweep.empty()) {
    for (Index f : {2, 4, 8, 16}) sweep.push_back(f * p.d());
  }

  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << "m,b_m,width,alpha,rho,sigma,theorem1,predicts_linear,epoch_cost_per_loop\n";
  out.precision(12);
  for (Index m : sweep) {
    BoundInputs in;
    in.m = m;
    in.d = p.d();
    in.W = W;
    in.theta = theta;
    in.L = sc.L;
    in.mu = sc.mu;
    in.k = k;
    out << m << "," << b_m(m) << "," << W << ",";
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double sigma = std::numeric_limits<double>::quiet_NaN();
    try { alpha = alpha_bound(in); } catch (const std::domain_error&) {}
    try { rho = rho_bound(in); } catch (const std::domain_error&) {}
    try { sigma = sigma_bound(in); } catch (const std::domain_error&) {}
    out << alpha << "," << rho << "," << sigma << ",";
    if (sc.mu > 0.0 && !std::isnan(alpha) && !std::isnan(rho)) {
      const OuterFactor f = theorem1_outer_factor(in, alpha, rho);
      out << f.value << "," << (f.predicts_linear ? 1 : 0) << ",";
    } else {
      out << "nan,0,";
    }
    // One outer loop: full gradient + sketch build + k sketched passes.
    const double nn = static_cast<double>(p.n());
    out << 2.0 + static_cast<double>(k) * static_cast<double>(m) / nn << "\n";
  }
  std::cout << "wrote " << output << "\n";
  return 0;
}

// ---- stepsizes ----------------------------------------------------------

int run_stepsizes(Index n, Index d, double kappa, Index m,
                  std::vector<Index> sweep, int trials,
                  std::optional<std::uint64_t> seed_opt,
                  const std::string& output) {
  if (sweep.empty()) sweep = {1, 2, 5, 10, 20, 50, d};
  const std::uint64_t base_seed = seed_opt.value_or(default_seed());

  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << "s,trial,mean_step,baseline_step\n";
  out.precision(12);
  for (Index s : sweep) {
    for (int trial = 0; trial < trials; ++trial) {
      SynthSpec spec;
      spec.n = n;
      spec.d = d;
      spec.s = std::min(s, d);
      spec.kappa = kappa;
      spec.seed = base_seed + static_cast<std::uint64_t>(trial) * 1000 +
                  static_cast<std::uint64_t>(s);
      GeneratedProblem g = gen_synthetic(spec, false);

      SolverConfig cfg;
      cfg.m = m > 0 ? m : std::min<Index>(4 * d, n);
      cfg.sketch = SketchKind::Count;
      cfg.run_gpcs = false;
      cfg.N = 5;
      cfg.k = 20;
      cfg.step = StepPolicy::line_search();
      cfg.seed = spec.seed;
      cfg.budgets.f_star = std::nullopt;
      SolveResult res = gpis(g.problem, cfg);

      double sum = 0.0;
      int count = 0;
      for (const TraceRecord& r : res.trace.records) {
        if (r.step > 0.0 && r.func_evals > 0) {
          sum += r.step;
          ++count;
        }
      }
      const double mean_step = count > 0 ? sum / count : 0.0;

      // Baseline: the fixed step 1/||S A||^2 of the first sketch.
      SketchOperator st = make_sketch(cfg.sketch, cfg.m, n, cfg.seed + 1);
      const double baseline = 1.0 / spectral_norm_sq(st.apply(g.problem.A), 1e-6, 2000);
      out << s << "," << trial << "," << mean_step << "," << baseline << "\n";
    }
  }
  std::cout << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched solvers for constrained least squares"};
  app.require_subcommand(1);

  GenOpts gen_opts;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a problem bundle");
  gen_cmd->add_option("--preset", gen_opts.preset,
                      "syn1-small | syn2-small | syn3-small");
  gen_cmd->add_option("--csv", gen_opts.csv_path, "build the problem from a CSV file");
  gen_cmd->add_option("--n", gen_opts.spec.n, "rows");
  gen_cmd->add_option("--d", gen_opts.spec.d, "columns");
  gen_cmd->add_option("--s", gen_opts.spec.s, "sparsity (or rank with --lowrank)");
  gen_cmd->add_option("--kappa", gen_opts.spec.kappa, "condition parameter");
  gen_cmd->add_flag("--transformed", gen_opts.spec.transformed,
                    "sparse in a random orthogonal dictionary");
  gen_cmd->add_flag("--lowrank", gen_opts.lowrank, "matrix-variate nuclear-ball problem");
  gen_cmd->add_option("--q", gen_opts.spec.q, "response columns (with --lowrank)");
  gen_cmd->add_option("--snr", gen_opts.spec.snr, "signal-to-noise ratio");
  gen_cmd->add_option("--relevant", gen_opts.relevant, "CSV: relevant feature count");
  gen_cmd->add_option("--irrelevant", gen_opts.irrelevant,
                      "CSV: appended random feature count");
  gen_cmd->add_option("--target-col", gen_opts.target_col, "CSV: target column index");
  gen_cmd->add_option("--oracle-tol", gen_opts.oracle_tol, "oracle certificate tolerance");
  std::uint64_t gen_seed = 0;
  CLI::Option* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("-o,--output", gen_opts.output, "bundle output path")->required();

  SolveOpts solve_opts;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one solver on a bundle");
  solve_cmd->add_option("bundle", solve_opts.bundle_path, "bundle path")->required();
  add_solver_flags(solve_cmd, solve_opts.solver);
  std::uint64_t solve_seed = 0;
  CLI::Option* solve_seed_opt = solve_cmd->add_option("--seed", solve_seed, "solver seed");
  solve_cmd->add_option("--epochs", solve_opts.epoch_budget, "epoch budget");
  solve_cmd->add_option("--time", solve_opts.time_budget, "wall-clock budget, seconds");
  solve_cmd->add_option("--target", solve_opts.target, "relative-error stop target");
  solve_cmd->add_option("--trace", solve_opts.trace_path, "trace CSV output path");
  solve_cmd->add_option("--summary", solve_opts.summary_path, "summary JSON output path");

  std::string bench_config;
  int bench_jobs = 1;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a solver comparison");
  bench_cmd->add_option("config", bench_config, "run-config JSON path")->required();
  bench_cmd->add_option("--jobs", bench_jobs, "parallel worker count");

  std::string bounds_bundle, bounds_out = "bounds.csv";
  std::vector<Index> bounds_sweep;
  double bounds_theta = 2.0;
  Index bounds_s = 0;
  int bounds_k = 1;
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "convergence-bound diagnostics");
  bounds_cmd->add_option("bundle", bounds_bundle, "bundle path")->required();
  bounds_cmd->add_option("--m", bounds_sweep, "sketch sizes (default 2d,4d,8d,16d)");
  bounds_cmd->add_option("--theta", bounds_theta, "tail parameter");
  bounds_cmd->add_option("--s", bounds_s, "sparsity for the width bound");
  bounds_cmd->add_option("--k", bounds_k, "inner iterations for the rate factor");
  bounds_cmd->add_option("-o,--output", bounds_out, "diagnostics CSV path");

  Index ss_n = 2000, ss_d = 100, ss_m = 0;
  double ss_kappa = 1e4;
  std::vector<Index> ss_sweep;
  int ss_trials = 5;
  std::uint64_t ss_seed = 0;
  std::string ss_out = "stepsizes.csv";
  CLI::App* ss_cmd = app.add_subcommand("stepsizes",
                                        "mean accepted step vs sparsity");
  ss_cmd->add_option("--n", ss_n, "rows");
  ss_cmd->add_option("--d", ss_d, "columns");
  ss_cmd->add_option("--kappa", ss_kappa, "condition parameter");
  ss_cmd->add_option("--m", ss_m, "sketch size (0 = 4d)");
  ss_cmd->add_option("--sweep", ss_sweep, "sparsity values");
  ss_cmd->add_option("--trials", ss_trials, "problems per sparsity value");
  CLI::Option* ss_seed_opt = ss_cmd->add_option("--seed", ss_seed, "base seed");
  ss_cmd->add_option("-o,--output", ss_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) {
      if (*gen_seed_opt) gen_opts.seed = gen_seed;
      return run_gen(gen_opts);
    }
    if (*solve_cmd) {
      if (*solve_seed_opt) solve_opts.seed = solve_seed;
      return run_solve(solve_opts);
    }
    if (*bench_cmd) return run_bench(bench_config, bench_jobs);
    if (*bounds_cmd) {
      return run_bounds(bounds_bundle, bounds_sweep, bounds_theta, bounds_s,
                        bounds_k, bounds_out);
    }
    if (*ss_cmd) {
      std::optional<std::uint64_t> seed;
      if (*ss_seed_opt) seed = ss_seed;
      return run_stepsizes(ss_n, ss_d, ss_kappa, ss_m, ss_sweep, ss_trials, seed,
                           ss_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
