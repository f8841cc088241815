#include <doctest.h>

#include <cmath>

#include "sketchls/theory.hpp"

using namespace sketchls;

TEST_CASE("b_m closed forms and bracketing") {
  CHECK(b_m(1) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK(b_m(2) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
  for (Index m : {1, 2, 3, 10, 100, 1000, 100000}) {
    const double b = b_m(m);
    CHECK(b > std::sqrt(static_cast<double>(m - 1)));
    CHECK(b < std::sqrt(static_cast<double>(m)));
  }
  CHECK_THROWS_AS(b_m(0), std::invalid_argument);
}

TEST_CASE("l1 cone width formula") {
  CHECK(l1_cone_width(4, 4) == doctest::Approx(std::sqrt(1.25 * 4.0)));
  const double w = l1_cone_width(10, 100);
  CHECK(w == doctest::Approx(std::sqrt(20.0 * std::log(10.0) + 12.5)).epsilon(1e-12));
  CHECK_THROWS_AS(l1_cone_width(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(l1_cone_width(6, 5), std::invalid_argument);
}

TEST_CASE("rho and sigma are nonincreasing over a dyadic m sweep") {
  BoundInputs in;
  in.d = 50;
  in.W = l1_cone_width(5, 50);
  in.L = 1.0;
  in.mu = 0.01;
  double prev_rho = std::numeric_limits<double>::infinity();
  double prev_sigma = std::numeric_limits<double>::infinity();
  double prev_alpha = 1.0 + 1e-9;
  for (Index m : {100, 200, 400, 800, 1600, 3200}) {
    in.m = m;
    const double rho = rho_bound(in);
    const double sigma = sigma_bound(in);
    const double alpha = alpha_bound(in);
    CHECK(rho <= prev_rho);
    CHECK(sigma <= prev_sigma);
    CHECK(alpha <= prev_alpha);
    CHECK(sigma >= 1.0);
    CHECK(alpha < 1.0);
    CHECK(alpha > 0.0);
    prev_rho = rho;
    prev_sigma = sigma;
    prev_alpha = alpha;
  }
}

TEST_CASE("insufficient sketch sizes are rejected") {
  BoundInputs in;
  in.m = 4;
  in.d = 100;
  in.W = 20.0;
  in.L = 1.0;
  in.mu = 0.5;
  CHECK_THROWS_AS(alpha_bound(in), std::domain_error);
  CHECK_THROWS_AS(rho_bound(in), std::domain_error);
  CHECK_THROWS_AS(sigma_bound(in), std::domain_error);
  CHECK_THROWS_AS(rho_bound_simplified(3.0, 4), std::domain_error);
}

TEST_CASE("simplified rho matches its formula") {
  const double got = rho_bound_simplified(2.0, 64);
  const double ratio = 2.0 / 8.0;
  CHECK(got == doctest::Approx(std::sqrt(2.0) * ratio / ((1 - ratio) * (1 - ratio))));
}

TEST_CASE("outer factor recovers rho as alpha vanishes") {
  BoundInputs in;
  in.m = 800;
  in.d = 100;
  in.L = 1.0;
  in.mu = 1e-4;
  in.k = 1;
  const double rho = 0.37;
  OuterFactor f = theorem1_outer_factor(in, 0.0, rho);
  CHECK(f.value == doctest::Approx(rho).epsilon(1e-12));
  CHECK(f.predicts_linear);

  in.mu = 0.0;
  CHECK_THROWS_AS(theorem1_outer_factor(in, 0.5, rho), std::domain_error);
}

TEST_CASE("sublinear floors scale as 1/sqrt(k) and 1/(k+1)") {
  BoundInputs in;
  in.L = 2.0;
  in.beta = 1.0;
  in.k = 16;
  RateFloors f = theorem23_residual(in, 4.0, 0.5, 3.0);
  // acc / gpis = 2 sqrt(k) / (k + 1)
  CHECK(f.acc / f.gpis ==
        doctest::Approx(2.0 * std::sqrt(16.0) / 17.0).epsilon(1e-12));
  CHECK(f.gpis ==
        doctest::Approx((std::sqrt(4.0) / 0.5) * std::sqrt(2.0 * 3.0 / 32.0)));

  CHECK_THROWS_AS(theorem23_residual(in, 4.0, 1.0, 3.0), std::domain_error);
}

TEST_CASE("classical-sketch floor") {
  CHECK(gpcs_floor(0.25, 2.0) == doctest::Approx(1.0));
}
