// SPDX-License-Identifier: Apache-2.0
// Reference implementations of the node kernels.
#include <cmath>

#include "uavplace/kernels.hpp"

namespace uavplace::kernels::detail {

namespace {

// Squared slant range below this is treated as zero (x on the UAV's nadir at h = 0).
constexpr double kTinyRange = 1e-300;

inline double squared_range(NodeView nodes, std::size_t k, const Point& u, double h2) {
  const double dx = nodes.xs[k] - u[0];
  double s = dx * dx + h2;
  if (!nodes.ys.empty()) {
    const double dy = nodes.ys[k] - u[1];
    s += dy * dy;
  }
  return s < kTinyRange ? 0.0 : s;
}

inline double exponent(double s, const RayleighKernel& k) {
  if (s == 0.0) return 0.0;
  return k.half_r == 1.0 ? k.lambda * s : k.lambda * std::pow(s, k.half_r);
}

}  // namespace

void multiply_rayleigh_outage_scalar(NodeView nodes, const Point& u, const RayleighKernel& k,
                                     std::span<double> prod) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = exponent(squared_range(nodes, i, u, k.h2), k);
    prod[i] *= -std::expm1(-t);
  }
}

void rayleigh_outage_and_slope_scalar(NodeView nodes, const Point& u, const RayleighKernel& k,
                                      std::span<double> q, std::span<double> slope) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double s = squared_range(nodes, i, u, k.h2);
    const double t = exponent(s, k);
    q[i] = -std::expm1(-t);
    slope[i] = s == 0.0 ? 0.0 : 2.0 * k.half_r * (t / s) * std::exp(-t);
  }
}

}  // namespace uavplace::kernels::detail
