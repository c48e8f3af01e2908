// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "uavplace/channel.hpp"

using namespace uavplace;

TEST_CASE("rayleigh success and outage") {
  RayleighParams p{0.7, 3.0, 0.4};
  for (double d : {0.0, 0.1, 0.5, 2.0}) {
    const double s = oracle::rayleigh_success(d * d, 0.7, 0.4, 3.0);
    CHECK(rayleigh_success_at(d, p) == doctest::Approx(s).epsilon(1e-15));
    CHECK(rayleigh_outage_at(d, p) == doctest::Approx(1.0 - s).epsilon(1e-14));
  }
  // Ground level, zero distance: certain success and an outage without cancellation.
  RayleighParams ground{1.0, 2.0, 0.0};
  CHECK(rayleigh_outage_at(0.0, ground) == 0.0);
  CHECK(rayleigh_outage_at(1e-9, ground) == doctest::Approx(1e-18).epsilon(1e-12));
  CHECK(success(Point(0.0, 0.0), Point(0.3, 0.4), ChannelModel{ground}) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
}

TEST_CASE("lambda from link budget") {
  CHECK(lambda_from_link(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(lambda_from_link(75.0, 1.0) == doctest::Approx(std::pow(10.0, -7.5)).epsilon(1e-14));
  CHECK(lambda_from_link(30.0, 2.0) == doctest::Approx(3e-3).epsilon(1e-14));
  CHECK_THROWS(lambda_from_link(10.0, 0.0));
}

TEST_CASE("elevation laws") {
  const auto p = RicianParams::suburban(1.0, 1.0);
  CHECK(p.b3 == doctest::Approx(2.0 / std::numbers::pi * std::log(3.0)));
  const auto zen = elevation_laws(std::numbers::pi / 2, p);
  CHECK(zen.k_factor == doctest::Approx(15.0));
  const auto hor = elevation_laws(0.0, p);
  CHECK(hor.k_factor == doctest::Approx(5.0));
  CHECK(hor.path_loss_exponent == doctest::Approx(p.a1 * hor.los_probability + p.b1));
  CHECK(elevation_angle(0.0, 1.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(elevation_angle(1.0, 1.0) == doctest::Approx(std::numbers::pi / 4));

  // LOS probability increases with elevation in either unit.
  for (AngleUnit unit : {AngleUnit::radians, AngleUnit::degrees}) {
    RicianParams q = p;
    q.los_angle_unit = unit;
    double prev = 0.0;
    for (double t = 0.0; t <= std::numbers::pi / 2; t += 0.05) {
      const double plos = elevation_laws(t, q).los_probability;
      CHECK(plos >= prev);
      CHECK(plos <= 1.0);
      prev = plos;
    }
  }
}

TEST_CASE("rician success equals the Marcum tail of the fading threshold") {
  for (AngleUnit unit : {AngleUnit::radians, AngleUnit::degrees}) {
    RicianParams p = RicianParams::suburban(0.05, 1.0);
    p.los_angle_unit = unit;
    for (double d : {0.0, 0.3, 1.0, 2.5}) {
      const auto laws = elevation_laws(elevation_angle(d, 1.0), p);
      const double thr = 0.05 * std::pow(d * d + 1.0, 0.5 * laws.path_loss_exponent);
      const double ref = oracle::rician_tail(laws.k_factor, thr);
      CHECK(rician_success_at(d, p) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(rician_outage_at(d, p) + rician_success_at(d, p) == doctest::Approx(1.0));
      CHECK(fading_threshold(d, ChannelModel{p}) == doctest::Approx(thr).epsilon(1e-14));
    }
  }
}

TEST_CASE("success decreases with ground distance") {
  const ChannelModel chans[] = {RayleighParams{1.0, 2.0, 0.5}, RicianParams::suburban(0.2, 0.5)};
  for (const auto& ch : chans) {
    double prev = 1.0;
    for (double d = 0.0; d < 4.0; d += 0.1) {
      const double s = success_at(d, ch);
      CHECK(s <= prev + 1e-15);
      CHECK(s >= 0.0);
      prev = s;
    }
  }
}

TEST_CASE("fading Monte Carlo agrees with the analytic outage within 3 sigma") {
  RandomStream pick(7);
  for (int k = 0; k < 20; ++k) {
    const double h = pick.uniform(0.2, 2.0);
    const double lambda = pick.uniform(0.05, 0.6);
    const Point x(pick.uniform(-1, 1), pick.uniform(-1, 1));
    const Point u(pick.uniform(-1, 1), pick.uniform(-1, 1));
    ChannelModel ch;
    if (k % 2 == 0) {
      ch = RayleighParams{lambda, 2.0 + pick.uniform(), h};
    } else {
      RicianParams p = RicianParams::suburban(lambda, h);
      p.los_angle_unit = k % 4 == 1 ? AngleUnit::radians : AngleUnit::degrees;
      ch = p;
    }
    const auto mc = simulate_outage_mc(x, u, ch, 200000, RandomStream(11, {static_cast<std::uint64_t>(k)}));
    const double exact = 1.0 - success(x, u, ch);
    const double sigma = std::sqrt(exact * (1.0 - exact) / 200000.0);
    CHECK(std::abs(mc.probability - exact) <= 3.0 * sigma + 1e-12);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(validate(ChannelModel{RayleighParams{-1.0, 2.0, 0.0}}));
  CHECK_THROWS(validate(ChannelModel{RayleighParams{1.0, 0.0, 0.0}}));
  RicianParams bad = RicianParams::suburban(1.0, 1.0);
  bad.a1 = -10.0;  // r turns negative at zenith once Plos is read in degrees
  bad.los_angle_unit = AngleUnit::radians;
  CHECK_NOTHROW(validate(ChannelModel{bad}));
  bad.los_angle_unit = AngleUnit::degrees;
  CHECK_THROWS(validate(ChannelModel{bad}));
}
