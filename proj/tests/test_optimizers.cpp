// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "uavplace/optimizers.hpp"

using namespace uavplace;

namespace {

Objective line_objective(double h = 0.5) {
  return Objective(Density::uniform1d(0.0, 1.0), RayleighParams{1.0, 2.0, h},
                   QuadratureSpec::defaults_for(1));
}

PsoConfig small_pso(std::uint64_t seed) {
  PsoConfig c;
  c.particles = 20;
  c.iterations = 60;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("pso is deterministic in its seed") {
  const Objective obj = line_objective();
  const auto a = pso_optimize(small_pso(5), obj, 3);
  const auto b = pso_optimize(small_pso(5), obj, 3);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(a.trace[t].positions == b.trace[t].positions);
    CHECK(a.trace[t].objective == b.trace[t].objective);
  }
  const auto c = pso_optimize(small_pso(6), obj, 3);
  CHECK(c.trace[0].positions != a.trace[0].positions);
}

TEST_CASE("pso best value never increases and stays in the box") {
  const Objective obj(Density::uniform_box2d(0, 1, 0, 2), RayleighParams{1.0, 2.0, 0.3},
                      QuadratureSpec::defaults_for(2));
  const auto r = pso_optimize(small_pso(2), obj, 2);
  for (std::size_t t = 1; t < r.trace.size(); ++t) CHECK(r.trace[t].objective <= r.trace[t - 1].objective);
  for (const auto& u : r.final_deployment.positions()) CHECK(obj.search_box().contains(u));
  CHECK(r.final_objective == doctest::Approx(obj.outage(r.final_deployment)).epsilon(1e-12));
  CHECK(r.evaluations == 20 * 61);
}

TEST_CASE("pso finds the centre for one UAV on a symmetric density") {
  const auto r = pso_optimize(small_pso(1), line_objective(), 1);
  CHECK(r.final_deployment[0][0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sequential full-view gd never increases the outage") {
  const Objective obj = line_objective(0.2);
  GdConfig cfg;
  cfg.sequential = true;
  cfg.policy = EtaPolicy::step_halving;
  cfg.iterations = 80;
  const auto r = gd_distributed(cfg, obj, Deployment::line({0.05, 0.1, 0.95}));
  for (std::size_t t = 1; t < r.trace.size(); ++t)
    CHECK(r.trace[t].objective <= r.trace[t - 1].objective * (1 + 1e-12));
  CHECK(r.final_objective < r.trace.front().objective);
}

TEST_CASE("full-view gd reaches the pso optimum on a line") {
  const Objective obj = line_objective(0.2);
  GdConfig cfg;
  cfg.policy = EtaPolicy::adaptive;
  cfg.iterations = 300;
  const auto gd = gd_distributed(cfg, obj, Deployment::line({0.1, 0.15}));
  PsoConfig pc = small_pso(3);
  pc.iterations = 150;
  const auto pso = pso_optimize(pc, obj, 2);
  CHECK(gd.final_objective == doctest::Approx(pso.final_objective).epsilon(1e-4));
  CHECK(gd.final_deployment.canonical()[0][0] == doctest::Approx(pso.final_deployment[0][0]).epsilon(1e-2));
}

TEST_CASE("gd stays in the box and reports its progress") {
  const Objective obj(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 0.2},
                      QuadratureSpec::defaults_for(2));
  GdConfig cfg;
  cfg.policy = EtaPolicy::adaptive;
  cfg.iterations = 30;
  cfg.sensing_radius = 0.4;
  cfg.comm_radius = 0.3;
  std::size_t calls = 0;
  const auto r = gd_distributed(cfg, obj, Deployment(std::vector<Point>{Point(0.0, 0.0), Point(1.0, 1.0), Point(0.9, 0.1)}),
                                [&](const IterationRecord& it) {
                                  CHECK(it.iteration == calls);
                                  ++calls;
                                });
  CHECK(calls == r.trace.size());
  for (const auto& u : r.final_deployment.positions()) CHECK(obj.search_box().contains(u));
  for (const auto& it : r.trace) {
    CHECK(it.objective >= 0.0);
    CHECK(it.objective <= 1.0);
    CHECK(it.eta > 0.0);
  }
}

TEST_CASE("a lone UAV that cannot see anyone goes to the centre") {
  const Objective obj(Density::uniform1d(0.0, 1000.0), RayleighParams{std::pow(10.0, -7.5), 2.0, 500.0},
                      QuadratureSpec::defaults_for(1));
  GdConfig cfg;
  cfg.policy = EtaPolicy::adaptive;
  cfg.comm_radius = 10.0;
  const auto r = gd_distributed(cfg, obj, Deployment::line({120.0}));
  CHECK(r.final_deployment[0][0] == doctest::Approx(500.0).epsilon(1e-3));
}

TEST_CASE("progress lines are json") {
  IterationRecord it;
  it.iteration = 3;
  it.positions = {0.1, 0.2};
  it.objective = 0.25;
  const auto j = nlohmann::json::parse(progress_json("pso", it));
  CHECK(j["iteration"] == 3);
  CHECK(j["algorithm"] == "pso");
  CHECK(j["objective"].get<double>() == 0.25);
}

TEST_CASE("random deployments follow the placement law") {
  RandomStream rng(8);
  const auto d = random_deployment(Density::uniform_box2d(2, 3, -1, 0), 50, rng);
  CHECK(d.size() == 50);
  for (const auto& u : d.positions()) CHECK(Box::rect(2, 3, -1, 0).contains(u));
  RandomStream again(8);
  CHECK(random_deployment(Density::uniform_box2d(2, 3, -1, 0), 50, again).flatten() == d.flatten());
}

TEST_CASE("config validation") {
  PsoConfig p;
  p.particles = 0;
  CHECK_THROWS(p.validate());
  GdConfig g;
  g.sensing_radius = -1.0;
  CHECK_THROWS(g.validate());
  CHECK(parse_policy("adaptive") == EtaPolicy::adaptive);
  CHECK(policy_name(EtaPolicy::step_halving) == "step_halving");
  CHECK_THROWS(parse_policy("sometimes"));
  const Objective obj = line_objective();
  CHECK_THROWS(gd_distributed(GdConfig{}, obj, Deployment(std::vector<Point>{Point(0.1, 0.1)})));
}
