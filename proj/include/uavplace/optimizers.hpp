// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uavplace/geometry.hpp"
#include "uavplace/objective.hpp"
#include "uavplace/rng.hpp"

namespace uavplace {

/// Particle swarm settings; one particle is a whole deployment.
struct PsoConfig {
  std::size_t particles = 60;
  std::size_t iterations = 300;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  double velocity_clamp = 0.2;  // fraction of the box extent per coordinate
  std::optional<Box> search_box;  // defaults to the density's support
  std::uint64_t seed = 1;

  void validate() const;
};

/// How each UAV adapts its own step from its local objective:
/// constant halves after 10 consecutive increases, step_halving halves on any
/// increase, adaptive also grows the step by 1.2 after a decrease.
enum class EtaPolicy { constant, step_halving, adaptive };

/// Distributed gradient descent settings. Each UAV keeps its own step size,
/// adjusted from its local objective.
struct GdConfig {
  std::size_t iterations = 300;
  double eta0 = 0.0;  // 0 picks 0.1 L / max_i |G_i(U_init)| from the exact gradient
  double eta_growth_limit = 10.0;  // cap on eta_i / eta0, scaled up as the local objective drops
  EtaPolicy policy = EtaPolicy::step_halving;
  double sensing_radius = kUnlimited;  // D_s
  double comm_radius = kUnlimited;     // D_c
  bool sequential = false;  // update UAVs one at a time instead of synchronously
  double grad_tol = 1e-6;   // on max_i |G_i| L / L_i, L_i the local objective
  std::optional<Box> search_box;
  std::uint64_t seed = 1;

  void validate() const;
};

std::string policy_name(EtaPolicy p);
EtaPolicy parse_policy(const std::string& name);

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<double> positions;  // flattened deployment
  double objective = 0.0;         // PSO: global best; GD: P_O of the current deployment
  double gradient_norm = 0.0;     // GD: max_i |G_i''|
  double eta = 0.0;               // GD
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string quadrature;
};

struct RunRecord {
  std::string algorithm;
  std::vector<IterationRecord> trace;
  Deployment final_deployment;
  double final_objective = 0.0;
  std::size_t evaluations = 0;  // objective (and gradient) evaluations
  bool converged = false;
  bool completed = true;        // false when an evaluation failed mid-run
  std::string termination;
  Provenance provenance;
};

/// Called after every iteration (and once for the initial state).
using ProgressFn = std::function<void(const IterationRecord&)>;

/// One JSON object per line: {"iteration":..,"objective":..,...}.
std::string progress_json(const std::string& algorithm, const IterationRecord& rec);

RunRecord pso_optimize(const PsoConfig& cfg, const Objective& objective, std::size_t n,
                       const ProgressFn& progress = {});
RunRecord pso_optimize(const PsoConfig& cfg, const Density& f, const ChannelModel& ch,
                       const QuadratureSpec& q, std::size_t n, const ProgressFn& progress = {});

RunRecord gd_distributed(const GdConfig& cfg, const Objective& objective,
                         const Deployment& init, const ProgressFn& progress = {});
RunRecord gd_distributed(const GdConfig& cfg, const Density& f, const ChannelModel& ch,
                         const QuadratureSpec& q, const Deployment& init,
                         const ProgressFn& progress = {});

/// n independent draws from the placement law.
Deployment random_deployment(const Density& law, std::size_t n, RandomStream& rng);

}  // namespace uavplace
