// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uavplace/kernels.hpp"
#include "uavplace/objective.hpp"

using namespace uavplace;

namespace {

double product_outage(const Point& x, const Deployment& U, const ChannelModel& ch) {
  double p = 1.0;
  for (const auto& u : U.positions()) p *= 1.0 - success(x, u, ch);
  return p;
}

double oracle_outage_1d(const Deployment& U, const Density& f, const ChannelModel& ch) {
  const Box b = f.support_bounds();
  return oracle::integrate([&](double x) { return product_outage(Point(x), U, ch) * f.eval(Point(x)); },
                           b.lo[0], b.hi[0], 1e-12);
}

double oracle_outage_2d(const Deployment& U, const Density& f, const ChannelModel& ch,
                        double tol = 1e-11) {
  const Box b = f.support_bounds();
  return oracle::integrate(
      [&](double y) {
        return oracle::integrate(
            [&](double x) { return product_outage(Point(x, y), U, ch) * f.eval(Point(x, y)); },
            b.lo[0], b.hi[0], tol, 10);
      },
      b.lo[1], b.hi[1], tol, 10);
}

Deployment random_deployment_in(const Box& b, std::size_t n, RandomStream& rng) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(b.dim == 1 ? Point(rng.uniform(b.lo[0], b.hi[0]))
                             : Point(rng.uniform(b.lo[0], b.hi[0]), rng.uniform(b.lo[1], b.hi[1])));
  return Deployment(pts);
}

Deployment shifted(const Deployment& U, std::size_t i, int axis, double delta) {
  std::vector<Point> p = U.positions();
  p[i][axis] += delta;
  return Deployment(p);
}

}  // namespace

TEST_CASE("1-D outage matches the oracle") {
  const auto f = Density::gaussian1d(0.0, 1.0);
  const ChannelModel rayleigh = RayleighParams{1.0, 2.0, 0.6};
  const ChannelModel rician = RicianParams::suburban(0.2, 0.8);
  const Deployment U = Deployment::line({-0.7, 0.1, 1.3});
  for (const auto& ch : {rayleigh, rician}) {
    const Objective obj(f, ch, QuadratureSpec::defaults_for(1));
    CHECK(obj.outage(U) == doctest::Approx(oracle_outage_1d(U, f, ch)).epsilon(1e-9));
  }
  const auto g = Density::uniform1d(0.0, 1.0);
  const Objective line(g, rayleigh, QuadratureSpec::defaults_for(1));
  const Deployment V = Deployment::line({0.2, 0.9});
  const auto est = line.outage_with_error(V);
  CHECK(est.value == doctest::Approx(oracle_outage_1d(V, g, rayleigh)).epsilon(1e-10));
  CHECK(est.error >= 0.0);
  CHECK(est.error <= 1e-9 * est.value);
}

TEST_CASE("2-D outage matches the oracle for every 2-D method") {
  const auto f = Density::uniform_box2d(0, 1, 0, 1);
  const ChannelModel ch = RayleighParams{1.0, 2.0, 0.5};
  const Deployment U(std::vector<Point>{Point(0.2, 0.3), Point(0.7, 0.6)});
  const double ref = oracle_outage_2d(U, f, ch);
  QuadratureSpec gl = QuadratureSpec::defaults_for(2);
  CHECK(Objective(f, ch, gl).outage(U) == doctest::Approx(ref).epsilon(1e-10));
  QuadratureSpec qmc = gl;
  qmc.method = QuadratureSpec::Method::qmc_2d;
  CHECK(Objective(f, ch, qmc).outage(U) == doctest::Approx(ref).epsilon(1e-4));

  const auto g = Density::gaussian2d(Point(0.0, 0.0), 1.0, 2.0);
  const ChannelModel ric = RicianParams::suburban(0.1, 1.0);
  const Deployment V(std::vector<Point>{Point(-0.5, 0.3), Point(0.4, -1.0)});
  CHECK(Objective(g, ric, gl).outage(V) == doctest::Approx(oracle_outage_2d(V, g, ric, 1e-8)).epsilon(1e-7));
}

TEST_CASE("outage properties") {
  RandomStream rng(21);
  const auto f = Density::uniform_box2d(0, 2, 0, 1);
  const Objective obj(f, RayleighParams{0.5, 2.5, 0.3}, QuadratureSpec::defaults_for(2));
  for (int trial = 0; trial < 10; ++trial) {
    const Deployment U = random_deployment_in(f.support_bounds(), 4, rng);
    const double p = obj.outage(U);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    // Symmetric in the UAVs.
    std::vector<Point> rev = U.positions();
    std::reverse(rev.begin(), rev.end());
    CHECK(obj.outage(Deployment(rev)) == doctest::Approx(p).epsilon(1e-14));
    // One more UAV never hurts.
    std::vector<Point> more = U.positions();
    more.push_back(Point(rng.uniform(0, 2), rng.uniform(0, 1)));
    CHECK(obj.outage(Deployment(more)) <= p);
  }
  // Repeated evaluation is bit-stable.
  const Deployment U = random_deployment_in(f.support_bounds(), 3, rng);
  CHECK(obj.outage(U) == obj.outage(U));
}

TEST_CASE("gradient matches central differences") {
  RandomStream rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + trial % 2;
    const Density f = dim == 1 ? (trial % 4 == 0 ? Density::gaussian1d(0, 1) : Density::uniform1d(0, 1))
                               : Density::uniform_box2d(0, 1, 0, 1);
    const ChannelModel ch = trial % 3 == 0 ? ChannelModel{RicianParams::suburban(0.3, 0.5)}
                                           : ChannelModel{RayleighParams{1.0, 2.0 + trial % 2, 0.4}};
    const Objective obj(f, ch, QuadratureSpec::defaults_for(dim));
    const Box box = f.support_bounds();
    const Box inner = dim == 1 ? Box::interval(box.lo[0] * 0.5, box.hi[0] * 0.5 + 0.25)
                               : Box::rect(0.1, 0.9, 0.1, 0.9);
    const Deployment U = random_deployment_in(inner, 3, rng);
    double value = 0.0;
    const auto g = obj.gradient_and_outage(U, value);
    CHECK(value == doctest::Approx(obj.outage(U)).epsilon(1e-12));
    const double step = 1e-4 * obj.length_scale();
    double gmax = 0.0;
    for (const auto& gi : g) gmax = std::max({gmax, std::abs(gi[0]), std::abs(gi[1])});
    for (std::size_t i = 0; i < U.size(); ++i)
      for (int a = 0; a < dim; ++a) {
        const double fd = (obj.outage(shifted(U, i, a, step)) - obj.outage(shifted(U, i, a, -step))) / (2 * step);
        worst = std::max(worst, std::abs(fd - g[i][a]) / gmax);
      }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient vanishes at the centre of a unimodal density for one UAV") {
  const Objective line(Density::gaussian1d(2.0, 1.0), RayleighParams{1.0, 2.0, 0.5},
                       QuadratureSpec::defaults_for(1));
  CHECK(std::abs(line.gradient(Deployment::line({2.0}))[0][0]) <= 1e-6 * line.length_scale());
  const Objective box(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 0.5},
                      QuadratureSpec::defaults_for(2));
  const auto g = box.gradient(Deployment::collapsed(Point(0.5, 0.5), 1));
  CHECK(std::hypot(g[0][0], g[0][1]) <= 1e-6);
}

TEST_CASE("unlimited local view equals the global gradient") {
  const Objective obj(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 0.3},
                      QuadratureSpec::defaults_for(2));
  const Deployment U(std::vector<Point>{Point(0.2, 0.2), Point(0.5, 0.8), Point(0.9, 0.4)});
  const auto g = obj.gradient(U);
  const auto local = obj.local_gradients(U, kUnlimited, kUnlimited);
  for (std::size_t i = 0; i < U.size(); ++i) {
    CHECK(local[i][0] == doctest::Approx(g[i][0]).epsilon(1e-12).scale(1e-14));
    CHECK(local[i][1] == doctest::Approx(g[i][1]).epsilon(1e-12).scale(1e-14));
    CHECK(obj.local_terms(i, U, kUnlimited, kUnlimited).local_objective ==
          doctest::Approx(obj.outage(U)).epsilon(1e-12));
  }
}

TEST_CASE("local view: neighbours and sensing disk") {
  const auto f = Density::uniform1d(0.0, 10.0);
  const Objective obj(f, RayleighParams{1.0, 2.0, 0.5}, QuadratureSpec::defaults_for(1));
  const Deployment U = Deployment::line({2.0, 3.0, 8.0});
  // UAV 0 sees UAV 1 only; its local objective ignores UAV 2.
  const auto t = obj.local_terms(0, U, kUnlimited, 2.0);
  CHECK(t.local_objective == doctest::Approx(obj.outage(Deployment::line({2.0, 3.0}))).epsilon(1e-10));
  CHECK(obj.local_gradient(0, U, kUnlimited, 2.0)[0] ==
        doctest::Approx(obj.gradient(Deployment::line({2.0, 3.0}))[0][0]).epsilon(1e-9));
  // A sensing disk of radius 1 integrates over [1, 3] only.
  const ChannelModel ch = obj.channel();
  const double disk = oracle::integrate(
      [&](double x) { return product_outage(Point(x), Deployment::line({2.0, 3.0}), ch) * 0.1; }, 1.0, 3.0);
  CHECK(obj.local_terms(0, U, 1.0, 2.0).local_objective == doctest::Approx(disk).epsilon(1e-9));
}

TEST_CASE("local_objective_at is the surrogate behind the local gradient") {
  RandomStream rng(4);
  const auto f = Density::uniform_box2d(0, 10, 0, 10);
  const Objective obj(f, RayleighParams{0.2, 2.0, 0.5}, QuadratureSpec::defaults_for(2));
  for (int trial = 0; trial < 5; ++trial) {
    const Deployment U = random_deployment_in(Box::rect(3, 7, 3, 7), 4, rng);
    const double ds = 3.0, dc = 2.5;
    for (std::size_t i = 0; i < U.size(); ++i) {
      std::vector<std::size_t> nb;
      for (std::size_t j = 0; j < U.size(); ++j)
        if (j != i && distance(U[i], U[j]) <= dc) nb.push_back(j);
      const auto t = obj.local_terms(i, U, ds, dc);
      CHECK(obj.local_objective_at(i, U, U[i], ds, nb) == doctest::Approx(t.local_objective).epsilon(1e-13));
      const double h = 1e-4;
      for (int a = 0; a < 2; ++a) {
        const double fd = (obj.local_objective_at(i, shifted(U, i, a, h), U[i], ds, nb) -
                           obj.local_objective_at(i, shifted(U, i, a, -h), U[i], ds, nb)) / (2 * h);
        CHECK(fd == doctest::Approx(t.gradient[a]).epsilon(1e-5).scale(1e-6 * std::abs(t.local_objective)));
      }
    }
  }
}

TEST_CASE("rician table interpolation stays close to exact evaluation") {
  const auto f = Density::uniform1d(0.0, 1000.0);
  RicianParams p = RicianParams::suburban(std::pow(10.0, -7.5), 500.0);
  p.los_angle_unit = AngleUnit::degrees;
  QuadratureSpec exact = QuadratureSpec::defaults_for(1);
  QuadratureSpec table = exact;
  table.rician_table = 16385;
  const Objective a(f, p, exact), b(f, p, table);
  for (const auto& U : {Deployment::line({500.0}), Deployment::line({200.0, 500.0, 800.0}),
                        Deployment::line({100.0, 400.0, 600.0, 900.0})}) {
    CHECK(b.outage(U) == doctest::Approx(a.outage(U)).epsilon(1e-7));
    const auto ga = a.gradient(U), gb = b.gradient(U);
    const double floor = 1e-3 * a.outage(U) / a.length_scale();
    for (std::size_t i = 0; i < U.size(); ++i)
      CHECK(std::abs(gb[i][0] - ga[i][0]) <= 1e-5 * std::max(std::abs(ga[i][0]), floor));
  }
}

TEST_CASE("scalar and SIMD kernels give the same objective") {
  if (!kernels::isa_supported(kernels::Isa::avx2)) return;
  const auto before = kernels::active_isa();
  const Objective obj(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 0.5},
                      QuadratureSpec::defaults_for(2));
  const Deployment U(std::vector<Point>{Point(0.3, 0.3), Point(0.6, 0.7)});
  kernels::set_active_isa(kernels::Isa::scalar);
  const double ps = obj.outage(U);
  const auto gs = obj.gradient(U);
  kernels::set_active_isa(kernels::Isa::avx2);
  const double pa = obj.outage(U);
  const auto ga = obj.gradient(U);
  kernels::set_active_isa(before);
  CHECK(pa == doctest::Approx(ps).epsilon(1e-14));
  for (std::size_t i = 0; i < 2; ++i) CHECK(ga[i][0] == doctest::Approx(gs[i][0]).epsilon(1e-12));
}

TEST_CASE("single success and expectation") {
  const auto f = Density::uniform1d(0.0, 1.0);
  const ChannelModel ch = RayleighParams{1.0, 2.0, 0.5};
  const Objective obj(f, ch, QuadratureSpec::defaults_for(1));
  CHECK(obj.single_success(Point(0.5)) == doctest::Approx(1.0 - obj.outage(Deployment::line({0.5}))).epsilon(1e-12));
  CHECK(obj.expectation([](const Point& x) { return x[0] * x[0]; }) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("bad inputs") {
  const Objective obj(Density::uniform1d(0, 1), RayleighParams{}, QuadratureSpec::defaults_for(1));
  CHECK_THROWS(obj.outage(Deployment(std::vector<Point>{Point(0.1, 0.2)})));
  QuadratureSpec q = QuadratureSpec::defaults_for(1);
  q.method = QuadratureSpec::Method::gauss_legendre_2d;
  CHECK_THROWS(Objective(Density::uniform1d(0, 1), RayleighParams{}, q));
  q = QuadratureSpec::defaults_for(1);
  q.rician_table = 2;
  CHECK_THROWS(Objective(Density::uniform1d(0, 1), RicianParams::suburban(1, 1), q));
}
