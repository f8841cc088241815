#include "sketchls/theory.hpp"

#include <cmath>
#include <string>

namespace sketchls {

double b_m(Index m) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double md = static_cast<double>(m);
  return std::sqrt(2.0) * std::exp(std::lgamma((md + 1.0) / 2.0) - std::lgamma(md / 2.0));
}

double l1_cone_width(Index s, Index d) {
  if (s < 1 || s > d) throw std::invalid_argument("sparsity must satisfy 1 <= s <= d");
  const double sd = static_cast<double>(s);
  const double dd = static_cast<double>(d);
  return std::sqrt(2.0 * sd * std::log(dd / sd) + 1.25 * sd);
}

namespace {

void require_margin(double bm, double gap, const char* what) {
  if (bm <= gap) {
    throw std::domain_error(std::string("sketch too small for ") + what +
                            " (b_m <= " + std::to_string(gap) + ")");
  }
}

}  // namespace

double alpha_bound(const BoundInputs& in) {
  if (in.theta <= 0.0) throw std::domain_error("theta must be positive");
  if (in.L <= 0.0) throw std::domain_error("L must be positive");
  const double bm = b_m(in.m);
  const double gap = std::sqrt(static_cast<double>(in.d)) + in.theta;
  require_margin(bm, gap, "inner-loop guarantee");
  const double ratio = (bm - gap) / (bm + gap);
  return 1.0 - (in.mu / in.L) * ratio * ratio;
}

double rho_bound(const BoundInputs& in) {
  if (in.theta <= 0.0) throw std::domain_error("theta must be positive");
  const double bm = b_m(in.m);
  const double gap = in.W + in.theta;
  require_margin(bm, gap, "outer-loop guarantee");
  const double md = static_cast<double>(in.m);
  const double denom = (bm - gap) * (bm - gap);
  return (md / denom) *
         (std::sqrt(2.0) * bm * gap / md + std::abs(bm * bm / md - 1.0));
}

double rho_bound_simplified(double W, Index m) {
  const double ratio = W / std::sqrt(static_cast<double>(m));
  if (ratio >= 1.0) throw std::domain_error("requires W < sqrt(m)");
  return std::sqrt(2.0) * ratio / ((1.0 - ratio) * (1.0 - ratio));
}

double sigma_bound(const BoundInputs& in) {
  if (in.theta <= 0.0) throw std::domain_error("theta must be positive");
  const double bm = b_m(in.m);
  const double gap = std::sqrt(static_cast<double>(in.d)) + in.theta;
  require_margin(bm, gap, "distortion guarantee");
  const double ratio = (bm + gap) / (bm - gap);
  return ratio * ratio;
}

OuterFactor theorem1_outer_factor(const BoundInputs& in, double alpha, double rho) {
  if (in.mu <= 0.0) throw std::domain_error("requires strong convexity (mu > 0)");
  OuterFactor out;
  out.value = std::pow(alpha, in.k) * (1.0 + rho) * std::sqrt(in.L / in.mu) + rho;
  out.predicts_linear = out.value < 1.0;
  return out;
}

RateFloors theorem23_residual(const BoundInputs& in, double sigma_max,
                              double rho_max, double R) {
  if (rho_max >= 1.0) throw std::domain_error("requires rho_max < 1");
  if (R < 0.0) throw std::domain_error("R must be nonnegative");
  const double kd = static_cast<double>(in.k);
  const double prefactor = std::sqrt(sigma_max) / (1.0 - rho_max);
  RateFloors out;
  out.gpis = prefactor * std::sqrt(in.beta * in.L * R / (2.0 * kd));
  out.acc = prefactor * std::sqrt(2.0 * in.beta * in.L * R) / (kd + 1.0);
  return out;
}

double gpcs_floor(double rho0, double e_norm) { return 2.0 * rho0 * e_norm; }

}  // namespace sketchls
