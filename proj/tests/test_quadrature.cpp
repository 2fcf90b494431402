#include "doctest.h"
#include "approx.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "unruhbec/quadrature.hpp"

using namespace unruhbec;


TEST_CASE("polynomials are integrated exactly") {
  auto f = [](double t) { return cplx(3 * t * t - 2 * t + 1, t * t * t); };
  const auto r = integrate_adaptive(f, -1.0, 2.0, [](double) { return 10.0; });
  CHECK(r.value.real() == rel_approx(9.0 - 3.0 + 3.0).epsilon(1e-14));
  CHECK(r.value.imag() == rel_approx((16.0 - 1.0) / 4.0).epsilon(1e-14));
}

TEST_CASE("oscillatory exponential against its closed form") {
  for (double w : {1.0, 37.0, 1000.0}) {
    auto f = [w](double t) { return std::exp(cplx(0, w * t)); };
    const double T = 5.3;
    const auto r = integrate_adaptive(f, 0.0, T, [w](double) { return 2 * std::numbers::pi / (10 * w); });
    const cplx exact = (std::exp(cplx(0, w * T)) - 1.0) / cplx(0, w);
    CHECK(std::abs(r.value - exact) <= 1e-8 * std::abs(exact));
  }
}

TEST_CASE("chirped phase with a Gaussian envelope") {
  // int exp(-t^2) exp(i b t) = sqrt(pi) exp(-b^2/4)
  const double b = 3.0;
  auto f = [b](double t) { return std::exp(-t * t) * std::exp(cplx(0, b * t)); };
  const auto r = integrate_adaptive(f, -12.0, 12.0, [](double) { return 0.5; });
  CHECK(r.value.real() == rel_approx(std::sqrt(std::numbers::pi) * std::exp(-b * b / 4)).epsilon(1e-9));
  CHECK(std::abs(r.value.imag()) < 1e-12);
}

TEST_CASE("breakpoints are honoured for kinked integrands") {
  auto f = [](double t) { return cplx(std::abs(t - 0.3), 0.0); };
  const auto r = integrate_adaptive(f, -1.0, 1.0, [](double) { return 2.0; }, {0.3});
  CHECK(r.value.real() == rel_approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-14));
  CHECK(r.panels == 2);
}

TEST_CASE("refinement stops at the panel budget with the best estimate") {
  auto f = [](double t) { return cplx(1.0 / std::sqrt(std::abs(t - 0.1234)), 0.0); };
  QuadratureOptions opts;
  opts.rel_tol = 1e-15;
  opts.max_panels = 40;
  try {
    integrate_adaptive(f, -1.0, 1.0, [](double) { return 2.0; }, {}, opts);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.best_estimate.real() > 3.0);
    CHECK(e.error_estimate > 0.0);
  }
  CHECK_THROWS_AS(integrate_adaptive(f, 1.0, 1.0, [](double) { return 1.0; }), std::domain_error);
}
