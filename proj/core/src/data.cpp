#include "sketchls/data.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "sketchls/projections.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

namespace {

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

// Orthogonal matrix from the QR of a Gaussian draw, sign-fixed so the result
// is deterministic.
Matrix random_orthogonal(Rng& rng, Index d) {
  Matrix G = random_matrix(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

// A = U diag(sigma) V^T with sigma_i = kappa^{-i/d}, so cond(A) = kappa^((d-1)/d).
Matrix conditioned_matrix(Rng& rng, Index n, Index d, double kappa) {
  Matrix A0 = random_matrix(rng, n, d);
  Eigen::BDCSVD<Matrix> svd(A0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("SVD failed in generator");
  Vector sigma(d);
  for (Index i = 0; i < d; ++i) {
    sigma[i] = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(d));
  }
  return svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

std::vector<Index> sample_support(Rng& rng, Index s, Index d) {
  std::vector<Index> all(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates.
  for (Index i = 0; i < s; ++i) {
    const Index j = i + static_cast<Index>(rng.uniform_index(
                            static_cast<std::uint64_t>(d - i)));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  all.resize(static_cast<std::size_t>(s));
  return all;
}

void validate_spec(const SynthSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("n and d must be positive");
  if (spec.s < 1 || spec.s > spec.d) {
    throw std::invalid_argument("s must satisfy 1 <= s <= d");
  }
  if (spec.kappa < 1.0) throw std::invalid_argument("kappa must be at least 1");
  if (spec.snr <= 0.0) throw std::invalid_argument("snr must be positive");
}

// --- reference-solution machinery ---------------------------------------

struct Reduced {
  Matrix R;       // d x d upper triangular
  Matrix c;       // d x q
  double offset;  // constant so that full objective = reduced + offset
};

Reduced qr_reduce(const Matrix& B, const Matrix& Y) {
  const Index d = B.cols();
  Eigen::HouseholderQR<Matrix> qr(B);
  Reduced red;
  red.R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  Matrix QtY = qr.householderQ().adjoint() * Y;
  red.c = QtY.topRows(d);
  red.offset = 0.5 * (Y.squaredNorm() - red.c.squaredNorm());
  return red;
}

// FISTA with gradient restart on (1/2)||c - R u||^2 over the constraint.
// Runs `iters` iterations in place.
void fista_rounds(const Reduced& red, const ConstraintSet& K, double step, Matrix& u,
                  long iters) {
  Matrix z = u;
  Matrix grad;
  double tau = 1.0;
  for (long i = 0; i < iters; ++i) {
    grad = red.R.transpose() * (red.R * z - red.c);
    Matrix u_next = project(K, z - step * grad).point;
    if (grad.cwiseProduct(u_next - u).sum() > 0.0) {
      tau = 1.0;
      z = u_next;
    } else {
      const double tau_next = (1.0 + std::sqrt(1.0 + 4.0 * tau * tau)) / 2.0;
      z = u_next + ((tau - 1.0) / tau_next) * (u_next - u);
      tau = tau_next;
    }
    u = std::move(u_next);
  }
}

// Exact KKT solve on the active face of the l1 ball, given the support and
// signs of a near-converged iterate. Returns false when the face is wrong.
bool l1_kkt_polish(const Reduced& red, double radius, Matrix& u) {
  const Index d = red.R.rows();
  std::vector<Index> support;
  for (Index i = 0; i < d; ++i) {
    if (u(i, 0) != 0.0) support.push_back(i);
  }
  if (support.empty()) return false;
  const Index s = static_cast<Index>(support.size());
  const Matrix G = red.R.transpose() * red.R;
  const Matrix h = red.R.transpose() * red.c;
  Matrix kkt(s + 1, s + 1);
  Vector rhs(s + 1);
  for (Index a = 0; a < s; ++a) {
    const Index ia = support[static_cast<std::size_t>(a)];
    for (Index b = 0; b < s; ++b) kkt(a, b) = G(ia, support[static_cast<std::size_t>(b)]);
    kkt(a, s) = u(ia, 0) < 0.0 ? -1.0 : 1.0;
    rhs[a] = h(ia, 0);
  }
  for (Index b = 0; b < s; ++b) {
    kkt(s, b) = u(support[static_cast<std::size_t>(b)], 0) < 0.0 ? -1.0 : 1.0;
  }
  kkt(s, s) = 0.0;
  rhs[s] = radius;
  Vector sol = kkt.colPivHouseholderQr().solve(rhs);
  const double lambda = sol[s];
  if (lambda < 0.0) return false;
  Matrix cand = Matrix::Zero(d, 1);
  for (Index a = 0; a < s; ++a) {
    const Index ia = support[static_cast<std::size_t>(a)];
    const double sign = u(ia, 0) < 0.0 ? -1.0 : 1.0;
    if (sol[a] * sign < 0.0) return false;  // sign pattern broke
    cand(ia, 0) = sol[a];
  }
  // Dual feasibility off the support.
  Matrix resid = h - G * cand;
  for (Index i = 0; i < d; ++i) {
    if (cand(i, 0) == 0.0 &&
        std::abs(resid(i, 0)) > lambda * (1.0 + 1e-8) + 1e-12) {
      return false;
    }
  }
  u = std::move(cand);
  return true;
}

double gradient_map_norm(const LSProblem& p, const Matrix& x, double eta) {
  Matrix grad = full_gradient(p, x);
  Matrix mapped = project(p.constraint, x - eta * grad).point;
  return (x - mapped).norm() / eta;
}

}  // namespace

Oracle oracle_solution(const LSProblem& p, double tol) {
  p.check();
  if (!p.A.allFinite() || !p.y.allFinite()) {
    throw std::invalid_argument("problem contains non-finite entries");
  }

  if (p.constraint.kind == ConstraintKind::Unconstrained) {
    Eigen::BDCSVD<Matrix> svd(p.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Oracle o;
    o.x_star = svd.solve(p.y);  // minimum-norm least squares
    o.f_star = objective(p, o.x_star);
    o.method = OracleMethod::NormalEquations;
    o.certificate = full_gradient(p, o.x_star).norm();
    return o;
  }

  // Work in the dictionary domain for transformed-l1 constraints.
  const bool transformed = p.constraint.kind == ConstraintKind::TransformedL1Ball;
  const bool l1_like = transformed || p.constraint.kind == ConstraintKind::L1Ball;
  Matrix B = transformed ? Matrix(p.A * p.constraint.phi.transpose()) : p.A;
  ConstraintSet inner_set =
      l1_like ? ConstraintSet::l1_ball(p.constraint.radius) : p.constraint;

  const Reduced red = qr_reduce(B, p.y);
  const double l_reduced = spectral_norm_sq(red.R, 1e-6, 2000);
  const double l_full = spectral_norm_sq(p.A, 1e-6, 2000);
  const double step = 1.0 / (l_reduced * (1.0 + 1e-3));
  const double eta_map = 1.0 / l_full;

  // Inactive constraint: the unconstrained solve is the answer.
  {
    Matrix u_unc = red.R.colPivHouseholderQr().solve(red.c);
    if (inner_set.value(u_unc) <= p.constraint.radius) {
      Oracle o;
      o.x_star = transformed ? Matrix(p.constraint.phi.transpose() * u_unc) : u_unc;
      o.f_star = objective(p, o.x_star);
      o.method = OracleMethod::NormalEquations;
      o.certificate = gradient_map_norm(p, o.x_star, eta_map);
      return o;
    }
  }

  Matrix u = Matrix::Zero(B.cols(), p.y.cols());
  const long round_iters = 2000;
  const int max_rounds = l1_like ? 100 : 400;
  for (int round = 0; round < max_rounds; ++round) {
    fista_rounds(red, inner_set, step, u, round_iters);
    Matrix u_cand = u;
    if (l1_like && !l1_kkt_polish(red, p.constraint.radius, u_cand)) {
      u_cand = u;  // face not settled yet, fall back to the iterate
    }
    Matrix x = transformed ? Matrix(p.constraint.phi.transpose() * u_cand) : u_cand;
    const double f = objective(p, x);
    const double cert = gradient_map_norm(p, x, eta_map);
    if (cert <= tol * (1.0 + f)) {
      Oracle o;
      o.x_star = std::move(x);
      o.f_star = f;
      o.method = OracleMethod::LongRunAccPGD;
      o.certificate = cert;
      return o;
    }
  }
  throw oracle_error("reference solve did not certify within the iteration cap");
}

GeneratedProblem gen_synthetic(const SynthSpec& spec, bool with_oracle,
                               double oracle_tol) {
  validate_spec(spec);
  Rng rng(spec.seed);
  Matrix A = conditioned_matrix(rng, spec.n, spec.d, spec.kappa);
  Matrix phi;
  if (spec.transformed) phi = random_orthogonal(rng, spec.d);

  Vector code = Vector::Zero(spec.d);
  for (Index i : sample_support(rng, spec.s, spec.d)) code[i] = rng.normal();
  Matrix x_gt = spec.transformed ? Matrix(phi.transpose() * code) : Matrix(code);
  const double radius = code.cwiseAbs().sum();

  Vector w(spec.n);
  for (Index i = 0; i < spec.n; ++i) w[i] = rng.normal();
  const Matrix signal = A * x_gt;
  w *= signal.norm() / (spec.snr * w.norm());

  GeneratedProblem out;
  out.problem.A = std::move(A);
  out.problem.y = signal + w;
  out.problem.constraint = spec.transformed
                               ? ConstraintSet::transformed_l1_ball(phi, radius)
                               : ConstraintSet::l1_ball(radius);
  out.x_gt = std::move(x_gt);
  if (with_oracle) out.oracle = oracle_solution(out.problem, oracle_tol);
  return out;
}

GeneratedProblem gen_lowrank(const SynthSpec& spec, bool with_oracle,
                             double oracle_tol) {
  validate_spec(spec);
  if (spec.q < 1) throw std::invalid_argument("q must be positive");
  if (spec.s > std::min(spec.d, spec.q)) {
    throw std::invalid_argument("rank must not exceed min(d, q)");
  }
  Rng rng(spec.seed);
  Matrix A = conditioned_matrix(rng, spec.n, spec.d, spec.kappa);
  Matrix left = random_matrix(rng, spec.d, spec.s);
  Matrix right = random_matrix(rng, spec.q, spec.s);
  Matrix x_gt = left * right.transpose();

  Eigen::BDCSVD<Matrix> svd(x_gt);
  const double radius = svd.singularValues().sum();

  Matrix w = random_matrix(rng, spec.n, spec.q);
  const Matrix signal = A * x_gt;
  w *= signal.norm() / (spec.snr * w.norm());

  GeneratedProblem out;
  out.problem.A = std::move(A);
  out.problem.y = signal + w;
  out.problem.constraint = ConstraintSet::nuclear_ball(radius, spec.d, spec.q);
  out.x_gt = std::move(x_gt);
  if (with_oracle) out.oracle = oracle_solution(out.problem, oracle_tol);
  return out;
}

namespace {

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  for (std::string& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) {
      c.pop_back();
    }
  }
  return cells;
}

}  // namespace

LSProblem load_regression_csv(const std::string& path, Index relevant,
                              Index irrelevant, std::uint64_t seed,
                              Index target_col) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  Index width = -1;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool all_numeric = true;
    Index bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        all_numeric = false;
        bad_col = static_cast<Index>(c) + 1;
        break;
      }
    }
    if (!all_numeric) {
      if (first_content_row) {
        first_content_row = false;  // header row
        continue;
      }
      throw std::runtime_error("non-numeric cell at row " + std::to_string(line_no) +
                               " column " + std::to_string(bad_col) + " of " + path);
    }
    first_content_row = false;
    if (width < 0) {
      width = static_cast<Index>(row.size());
    } else if (static_cast<Index>(row.size()) != width) {
      throw std::runtime_error("ragged row " + std::to_string(line_no) + " of " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);
  const Index n = static_cast<Index>(rows.size());
  if (width < 2) throw std::runtime_error("need at least one feature and a target");
  const Index tcol = target_col >= 0 ? target_col : width - 1;
  if (tcol >= width) throw std::runtime_error("target column out of range");

  Index d_rel = width - 1;
  if (relevant > 0) d_rel = std::min(d_rel, relevant);
  if (irrelevant < 0) throw std::invalid_argument("irrelevant count must be nonnegative");

  Matrix X(n, d_rel + irrelevant);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    y[i] = row[static_cast<std::size_t>(tcol)];
    Index k = 0;
    for (Index c = 0; c < width && k < d_rel; ++c) {
      if (c == tcol) continue;
      X(i, k++) = row[static_cast<std::size_t>(c)];
    }
  }
  Rng rng(seed);
  for (Index c = d_rel; c < X.cols(); ++c) {
    for (Index i = 0; i < n; ++i) X(i, c) = rng.normal();
  }
  for (Index c = 0; c < X.cols(); ++c) {
    const double nrm = X.col(c).norm();
    if (nrm > 0.0) X.col(c) /= nrm;
  }

  // Constraint radius: l1 norm of the unconstrained solution on the
  // relevant-only columns.
  Eigen::BDCSVD<Matrix> svd(X.leftCols(d_rel),
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector x_rel = svd.solve(y);
  const double radius = x_rel.cwiseAbs().sum();

  LSProblem p;
  p.A = std::move(X);
  p.y = y;
  p.constraint = ConstraintSet::l1_ball(radius);
  return p;
}

}  // namespace sketchls
