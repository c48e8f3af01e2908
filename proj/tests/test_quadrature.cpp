// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "uavplace/quadrature.hpp"

using namespace uavplace;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (std::size_t order : {1, 2, 5, 16, 64}) {
    const auto& rule = quadrature::gauss_legendre(order);
    REQUIRE(rule.nodes.size() == order);
    for (std::size_t k = 0; k < 2 * order; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], double(k));
      const double exact = k % 2 ? 0.0 : 2.0 / double(k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("kronrod tables are consistent") {
  using GK = quadrature::GaussKronrod15;
  double kw = GK::kronrod_weights[7];
  for (int i = 0; i < 7; ++i) kw += 2.0 * GK::kronrod_weights[i];
  CHECK(kw == doctest::Approx(2.0).epsilon(1e-15));
  double gw = GK::gauss_weights[3];
  for (int i = 0; i < 3; ++i) gw += 2.0 * GK::gauss_weights[i];
  CHECK(gw == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("adaptive integration") {
  auto r = quadrature::integrate_adaptive([](double x) { return std::exp(-x * x); }, -10, 10, 0, 1e-12);
  CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(r.error <= 1e-11);
  r = quadrature::integrate_adaptive([](double x) { return std::sqrt(x); }, 0, 1, 0, 1e-10);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  r = quadrature::integrate_adaptive([](double x) { return x < 0.3 ? 1.0 : 0.0; }, 0, 1, 1e-9, 0);
  CHECK(r.value == doctest::Approx(0.3).epsilon(1e-8));
  CHECK_THROWS_AS(
      quadrature::integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-9, 1, 0, 1e-15, 1000),
      QuadratureError);
}

TEST_CASE("pairwise sum is order-stable and accurate") {
  std::vector<double> v(100001, 0.1);
  const double s = quadrature::pairwise_sum(v);
  CHECK(s == doctest::Approx(10000.1).epsilon(1e-14));
  CHECK(quadrature::pairwise_sum(v) == s);
  CHECK(quadrature::pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("shifted kronecker points fill the unit square evenly") {
  const auto pts = quadrature::shifted_kronecker_2d(4096, 0.3, 0.7);
  REQUIRE(pts.size() == 4096);
  double mx = 0, my = 0, mxy = 0;
  for (const auto& p : pts) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 1.0);
    mx += p[0];
    my += p[1];
    mxy += p[0] * p[1];
  }
  CHECK(mx / 4096 == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(my / 4096 == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(mxy / 4096 == doctest::Approx(0.25).epsilon(2e-3));
}
