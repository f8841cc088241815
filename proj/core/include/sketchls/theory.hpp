#ifndef SKETCHLS_THEORY_HPP
#define SKETCHLS_THEORY_HPP

#include "sketchls/problem.hpp"

namespace sketchls {

// Inputs shared by the convergence-bound calculators. The bounds assume a
// Gaussian sketch; for other sketch kinds they are advisory only.
struct BoundInputs {
  Index m = 0;        // sketch size
  Index d = 0;        // ambient dimension
  double W = 0.0;     // Gaussian width of the transformed cone on the sphere
  double theta = 2.0; // tail parameter, > 0
  double L = 0.0;
  double mu = 0.0;
  int k = 1;          // inner iterations
  double beta = 1.0;  // 1 for fixed steps, gamma_u with line search
};

// Expected norm of an m-dimensional standard Gaussian vector,
// sqrt(2) Gamma((m+1)/2) / Gamma(m/2), computed via log-gamma.
double b_m(Index m);

// Width bound sqrt(2 s log(d/s) + (5/4) s) for s-sparse solutions in an l1
// ball (natural log).
double l1_cone_width(Index s, Index d);

// Inner-loop contraction bound; requires b_m(m) > sqrt(d) + theta.
double alpha_bound(const BoundInputs& in);

// Outer-loop contraction bound; requires b_m(m) > W + theta.
double rho_bound(const BoundInputs& in);

// Asymptotic form sqrt(2) (W/sqrt(m)) / (1 - W/sqrt(m))^2.
double rho_bound_simplified(double W, Index m);

// Sketch distortion bound, >= 1; requires b_m(m) > sqrt(d) + theta.
double sigma_bound(const BoundInputs& in);

struct OuterFactor {
  double value = 0.0;
  bool predicts_linear = false;  // value < 1
};

// rho_star = alpha^k [(1 + rho) sqrt(L/mu)] + rho; requires mu > 0.
OuterFactor theorem1_outer_factor(const BoundInputs& in, double alpha, double rho);

struct RateFloors {
  double gpis = 0.0;  // 1/sqrt(k) form
  double acc = 0.0;   // 1/(k+1) form
};

// Additive error floors for the sublinear regimes; requires rho_max < 1.
RateFloors theorem23_residual(const BoundInputs& in, double sigma_max,
                              double rho_max, double R);

// 2 rho_0 ||e||_2, the accuracy floor of the classical-sketch phase.
double gpcs_floor(double rho0, double e_norm);

}  // namespace sketchls

#endif
