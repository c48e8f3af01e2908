// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "uavplace/kernels.hpp"

namespace uavplace::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("UAVPLACE_ISA"); env && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(UAVPLACE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error("instruction set not supported: " + isa_name(isa));
  active().store(isa, std::memory_order_relaxed);
}

void multiply_rayleigh_outage(Isa isa, NodeView nodes, const Point& u, const RayleighKernel& k,
                              std::span<double> prod) {
#if defined(UAVPLACE_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::multiply_rayleigh_outage_avx2(nodes, u, k, prod);
#endif
  (void)isa;
  detail::multiply_rayleigh_outage_scalar(nodes, u, k, prod);
}

void rayleigh_outage_and_slope(Isa isa, NodeView nodes, const Point& u, const RayleighKernel& k,
                               std::span<double> q, std::span<double> slope) {
#if defined(UAVPLACE_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::rayleigh_outage_and_slope_avx2(nodes, u, k, q, slope);
#endif
  (void)isa;
  detail::rayleigh_outage_and_slope_scalar(nodes, u, k, q, slope);
}

}  // namespace uavplace::kernels
