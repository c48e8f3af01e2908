// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavplace/channel.hpp"
#include "uavplace/density.hpp"
#include "uavplace/objective.hpp"
#include "uavplace/optimizers.hpp"

namespace uavplace::simkit {

using Json = nlohmann::json;

/// Thrown by the parsers below; what() lists every violation found.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Collects violations under a JSON-pointer-like path prefix.
struct Problems {
  std::vector<std::string> list;
  void add(const std::string& where, const std::string& what) { list.push_back(where + ": " + what); }
  void raise_if_any() const;
};

/// Sorted keys, no whitespace; the input to config hashes.
std::string canonical_json(const Json& j);
/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const Json& config);

/// Non-negative integer, whether stored signed or unsigned.
inline bool is_count(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0);
}

/// Radii may be numbers or the string "inf".
double parse_radius(const Json& j, const std::string& where, Problems& problems);
Json radius_to_json(double r);

Density parse_density(const Json& j, const std::string& where, Problems& problems);
/// Channel with its altitude; "link": {"ap_over_n0_db", "rho"} may replace "lambda".
ChannelModel parse_channel(const Json& j, const std::string& where, Problems& problems);
QuadratureSpec parse_quadrature(const Json& j, int dim, const std::string& where,
                                Problems& problems);
PsoConfig parse_pso(const Json& j, const std::string& where, Problems& problems);
GdConfig parse_gd(const Json& j, const std::string& where, Problems& problems);

/// One optimizer entry of an experiment. GD runs once per restart from
/// independent uniform initial deployments over the search box unless
/// explicit initial positions are given.
struct OptimizerSpec {
  std::string algorithm;  // "pso" or "gd"
  std::string label;
  PsoConfig pso;
  GdConfig gd;
  std::size_t restarts = 1;
  std::vector<double> init;  // flattened; empty means random
};

struct ExperimentSpec {
  std::string name;
  Density density = Density::uniform1d(0.0, 1.0);
  ChannelModel channel = RayleighParams{};
  std::vector<std::size_t> n_values;
  std::vector<double> altitudes;
  std::vector<OptimizerSpec> optimizers;
  QuadratureSpec quadrature;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::string length_unit;
  Json source;  // the validated document, hashed for provenance
};

/// Density, channel (at its altitude) and quadrature of a document. Accepts
/// experiment documents; the sweep and optimizer members are left unchecked.
struct ModelSpec {
  Density density = Density::uniform1d(0.0, 1.0);
  ChannelModel channel = RayleighParams{};
  QuadratureSpec quadrature;
  std::uint64_t seed = 1;
  std::string length_unit;
};
ModelSpec parse_model(const Json& j);

/// Validates the whole document and throws SpecError listing every problem.
ExperimentSpec parse_experiment(const Json& j);
ExperimentSpec load_experiment(const std::string& path);

}  // namespace uavplace::simkit
