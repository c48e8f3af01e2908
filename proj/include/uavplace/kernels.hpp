// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "uavplace/geometry.hpp"

namespace uavplace::kernels {

/// Instruction-set variant of the node kernels. The scalar variant is the
/// reference; the others must agree with it to a few ulps.
enum class Isa { scalar, avx2 };

std::string isa_name(Isa isa);
bool isa_supported(Isa isa);

/// Variant used by the library. Chosen once: AVX2+FMA when the CPU has it,
/// unless UAVPLACE_ISA=scalar is set in the environment.
Isa active_isa();
/// Overrides the runtime choice (tests and benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);

/// Quadrature nodes as structure-of-arrays; ys is empty for d = 1.
struct NodeView {
  std::span<const double> xs;
  std::span<const double> ys;
  std::size_t size() const { return xs.size(); }
  int dim() const { return ys.empty() ? 1 : 2; }
};

/// Rayleigh kernel constants: t = lambda (|x-u|^2 + h^2)^{half_r}.
struct RayleighKernel {
  double lambda;
  double half_r;
  double h2;
};

/// prod[k] *= 1 - exp(-t_k) for one UAV at u.
void multiply_rayleigh_outage(Isa isa, NodeView nodes, const Point& u, const RayleighKernel& k,
                              std::span<double> prod);

/// q[k] = 1 - exp(-t_k) and slope[k] = 2 half_r (t_k / s_k) exp(-t_k), the
/// radial factor with d g / d u = slope (x - u).
void rayleigh_outage_and_slope(Isa isa, NodeView nodes, const Point& u, const RayleighKernel& k,
                               std::span<double> q, std::span<double> slope);

namespace detail {
// Per-variant entry points; the dispatcher above selects one.
void multiply_rayleigh_outage_scalar(NodeView, const Point&, const RayleighKernel&,
                                     std::span<double>);
void rayleigh_outage_and_slope_scalar(NodeView, const Point&, const RayleighKernel&,
                                      std::span<double>, std::span<double>);
#if defined(UAVPLACE_HAVE_AVX2)
void multiply_rayleigh_outage_avx2(NodeView, const Point&, const RayleighKernel&,
                                   std::span<double>);
void rayleigh_outage_and_slope_avx2(NodeView, const Point&, const RayleighKernel&,
                                    std::span<double>, std::span<double>);
#endif
}  // namespace detail

}  // namespace uavplace::kernels
