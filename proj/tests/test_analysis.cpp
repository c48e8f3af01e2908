// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "uavplace/analysis.hpp"

using namespace uavplace;
using namespace uavplace::analysis;

namespace {

double gaussian_collapsed(std::size_t n, double h, double sigma) {
  return oracle::integrate(
      [&](double x) { return std::pow(-std::expm1(-(x * x + h * h)), double(n)) * oracle::normal_pdf(x, 0, sigma * sigma); },
      -12 * sigma, 12 * sigma, 1e-13);
}

double square_collapsed(std::size_t n, double h, double a) {
  return oracle::integrate(
             [&](double y) {
               return oracle::integrate(
                   [&](double x) { return std::pow(-std::expm1(-(x * x + y * y + h * h)), double(n)); }, -a, a,
                   1e-13);
             },
             -a, a, 1e-13) /
         (4 * a * a);
}

}  // namespace

TEST_CASE("closed form for the uniform square matches the oracle") {
  for (double h : {0.0, 0.25, 0.5, 1.0})
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto cf = closed_form_uniform_square(n, h);
      CHECK(cf.value == doctest::Approx(square_collapsed(n, h, 0.5)).epsilon(1e-9).scale(1e-14));
    }
  CHECK(closed_form_uniform_square(3, 0.7, 1.5).value ==
        doctest::Approx(square_collapsed(3, 0.7, 1.5)).epsilon(1e-9));
}

TEST_CASE("closed form for the gaussian line matches the oracle") {
  for (double h2 : {0.5, 1.0, 2.0})
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto cf = closed_form_gaussian(n, std::sqrt(h2), 1.0);
      CHECK(cf.value == doctest::Approx(gaussian_collapsed(n, std::sqrt(h2), 1.0)).epsilon(1e-8));
    }
  // A finite window only removes mass.
  CHECK(closed_form_gaussian(3, 1.0, 1.0, 1.0).value < closed_form_gaussian(3, 1.0, 1.0).value);
}

TEST_CASE("closed forms fall back to quadrature when the alternating sum cancels") {
  const auto cf = closed_form_uniform_square(40, 0.2);
  CHECK(cf.fallback);
  CHECK(cf.value == doctest::Approx(square_collapsed(40, 0.2, 0.5)).epsilon(1e-7).scale(1e-300));
}

TEST_CASE("closed forms equal the objective at the collapsed deployment") {
  const Objective box(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 0.5},
                      QuadratureSpec::defaults_for(2));
  for (std::size_t n = 1; n <= 8; ++n)
    CHECK(box.outage(Deployment::collapsed(Point(0.5, 0.5), n)) ==
          doctest::Approx(closed_form_uniform_square(n, 0.5).value).epsilon(1e-9).scale(1e-14));
}

TEST_CASE("lower bounds") {
  CHECK(lower_bound_altitude(1.0, 1.0, 2.0, 3) == doctest::Approx(std::pow(1 - std::exp(-1.0), 3)));
  CHECK(lower_bound_altitude(1.0, 0.0, 2.0, 3) == 0.0);
  CHECK(lower_bound_ground_uniform(2.0, 1) == doctest::Approx(0.0350536).epsilon(1e-5));
  CHECK(lower_bound_ground_uniform(2.0, 2) == doctest::Approx(std::pow(1 - std::exp(-1.0 / 9), 2) / 3));
  CHECK_THROWS(lower_bound_ground_uniform(1.0, 2));

  // Every deployment respects the altitude bound.
  RandomStream rng(2);
  const Objective obj(Density::uniform1d(0, 1), RayleighParams{1.0, 2.0, 0.5}, QuadratureSpec::defaults_for(1));
  for (int t = 0; t < 20; ++t) {
    const Deployment U = Deployment::line({rng.uniform(), rng.uniform(), rng.uniform()});
    CHECK(obj.outage(U) >= lower_bound_altitude(1.0, 0.5, 2.0, 3) - 1e-15);
  }
}

TEST_CASE("random-placement bound: Monte Carlo agrees with quadrature") {
  const auto f = Density::uniform1d(0, 1);
  const Objective obj(f, RayleighParams{1.0, 2.0, 0.3}, QuadratureSpec::defaults_for(1));
  const auto mc = upper_bound_random(obj, 3, f, 4000, RandomStream(12));
  const double exact = upper_bound_random_exact(obj, 3, f);
  CHECK(std::abs(mc.value - exact) <= 4 * mc.standard_error);
  CHECK(mc.samples == 4000);
  // The MC estimate is reproducible from its stream.
  CHECK(upper_bound_random(obj, 3, f, 4000, RandomStream(12)).value == mc.value);
}

TEST_CASE("asymptotic optimum") {
  const Objective box(Density::uniform_box2d(0, 2, 0, 2), RayleighParams{1.0, 2.0, 2.0},
                      QuadratureSpec::defaults_for(2));
  const auto a = asymptotic_optimum(box, 4);
  CHECK(a.u_star[0] == doctest::Approx(1.0));
  CHECK(a.predicted_one_minus_outage == doctest::Approx(4 * box.single_success(Point(1.0, 1.0))));

  const auto bimodal = Density::mixture({0.25, 0.75}, {Density::gaussian1d(-2, 0.25), Density::gaussian1d(2, 0.25)});
  const Objective line(bimodal, RayleighParams{1.0, 2.0, 1.0}, QuadratureSpec::defaults_for(1));
  const auto b = asymptotic_optimum(line, 2);
  CHECK(b.u_star[0] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("marcum bound clipping") {
  const auto b = marcum_upper_bound(3.0, 1.0);
  CHECK(b.clipped);
  CHECK(b.reported == 1.0);
  const auto c = marcum_upper_bound(1.0, 4.0);
  CHECK_FALSE(c.clipped);
  CHECK(c.value == doctest::Approx(std::exp(-8.0 + 4.0)));
}

TEST_CASE("bound report") {
  const auto f = Density::uniform1d(0, 1);
  const Objective ground(f, RayleighParams{1.0, 2.0, 0.0}, QuadratureSpec::defaults_for(1));
  const double achieved = ground.outage(Deployment::line({0.5}));
  const auto rep = bound_report(ground, 1, achieved, f, 500, RandomStream(1));
  CHECK(rep.lower == doctest::Approx(lower_bound_ground_uniform(2.0, 1)));
  CHECK(rep.consistent(1e-12));
  CHECK(rep.witnesses.size() == 3);
  const Objective rician(f, RicianParams::suburban(1, 1), QuadratureSpec::defaults_for(1));
  CHECK_THROWS(bound_report(rician, 2, 0.1, f, 10, RandomStream(1)));
}
