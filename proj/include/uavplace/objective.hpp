// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "uavplace/channel.hpp"
#include "uavplace/density.hpp"
#include "uavplace/geometry.hpp"

namespace uavplace {

/// How integrals against the density are evaluated.
struct QuadratureSpec {
  enum class Method { adaptive_1d, gauss_legendre_2d, qmc_2d };

  Method method = Method::adaptive_1d;
  double target_rel_tol = 1e-10;
  std::size_t max_evals = 4'000'000;
  std::size_t base_panels = 32;       // adaptive_1d: initial panels over the support
  std::size_t nodes_per_axis = 96;    // gauss_legendre_2d
  std::size_t qmc_points = 65536;     // qmc_2d, split evenly over the shifts
  std::size_t qmc_shifts = 8;
  std::size_t disk_radial = 48;       // polar rule for sensing disks (d = 2)
  std::size_t disk_angular = 64;
  // Rician only: interpolate ln(outage) over ground distance from this many
  // exact samples instead of evaluating Q1 per node. 0 keeps exact evaluation.
  std::size_t rician_table = 0;

  static QuadratureSpec defaults_for(int dim);
  void validate(int dim) const;
  std::string describe() const;
};

std::string method_name(QuadratureSpec::Method m);
QuadratureSpec::Method parse_method(const std::string& name);

struct OutageEstimate {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

/// Range-limited view of one UAV: G_i'' and the matching local objective
/// int_{B(u_i, D_s)} prod_{j in N_i and i} (1 - s(x, u_j)) f(x) dx.
struct LocalTerms {
  Point gradient;
  double local_objective = 0.0;
};

constexpr double kUnlimited = std::numeric_limits<double>::infinity();

/// P_O(U) = int prod_i (1 - s(x, u_i)) f(x) dx and its gradients for a fixed
/// density, channel and quadrature. Node sets for d = 2 are built once, so
/// repeated evaluations are bit-stable. Thread-safe for concurrent use.
class Objective {
 public:
  Objective(Density f, ChannelModel ch, QuadratureSpec q);
  ~Objective();
  Objective(const Objective&);
  Objective& operator=(const Objective&);
  Objective(Objective&&) noexcept;
  Objective& operator=(Objective&&) noexcept;

  const Density& density() const { return f_; }
  const ChannelModel& channel() const { return ch_; }
  const QuadratureSpec& quadrature() const { return q_; }
  int dim() const { return f_.dim(); }
  /// Largest extent of the support box.
  double length_scale() const;
  Box search_box() const { return f_.support_bounds(); }

  double outage(const Deployment& U) const;
  OutageEstimate outage_with_error(const Deployment& U) const;

  /// dP_O/du_i for every UAV, so u_i <- u_i - eta G_i descends.
  std::vector<Point> gradient(const Deployment& U) const;
  /// gradient() plus P_O from the same nodes.
  std::vector<Point> gradient_and_outage(const Deployment& U, double& value) const;

  /// G_i restricted to the sensing disk B(u_i, D_s) and to neighbours within
  /// D_c of u_i. Either radius may be kUnlimited.
  Point local_gradient(std::size_t i, const Deployment& U, double sensing_radius,
                       double comm_radius) const;
  /// local_gradient for every UAV, neighbour sets from the same positions.
  std::vector<Point> local_gradients(const Deployment& U, double sensing_radius,
                                     double comm_radius) const;

  LocalTerms local_terms(std::size_t i, const Deployment& U, double sensing_radius,
                         double comm_radius) const;
  std::vector<LocalTerms> local_terms_all(const Deployment& U, double sensing_radius,
                                          double comm_radius) const;

  /// Local objective of UAV i over the disk B(centre, D_s) with the given
  /// neighbour set held fixed. Equals local_terms().local_objective when
  /// centre = u_i and the neighbours are those within D_c of u_i.
  double local_objective_at(std::size_t i, const Deployment& U, const Point& centre,
                            double sensing_radius,
                            const std::vector<std::size_t>& neighbours) const;

  /// int s(x, u) f(x) dx for a single UAV at u.
  double single_success(const Point& u) const;
  /// int g(x) f(x) dx on the objective's nodes (d = 2) or adaptively (d = 1).
  double expectation(const std::function<double(const Point&)>& g) const;

 private:
  struct Impl;
  LocalTerms local_terms_over(std::size_t i, const std::vector<Point>& pos, const Point& centre,
                              double sensing_radius, std::vector<std::size_t> neighbours) const;

  Density f_;
  ChannelModel ch_;
  QuadratureSpec q_;
  std::shared_ptr<const Impl> impl_;
};

/// One-shot conveniences.
double outage(const Deployment& U, const Density& f, const ChannelModel& ch,
              const QuadratureSpec& q);
std::vector<Point> gradient(const Deployment& U, const Density& f, const ChannelModel& ch,
                            const QuadratureSpec& q);
Point local_gradient(std::size_t i, const Deployment& U, const Density& f,
                     const ChannelModel& ch, double sensing_radius, double comm_radius,
                     const QuadratureSpec& q);

}  // namespace uavplace
