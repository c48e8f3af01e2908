// SPDX-License-Identifier: Apache-2.0
// AVX2+FMA node kernels. Built with -mavx2 -mfma; only called after the
// dispatcher has confirmed CPU support.
#include <array>

#include "avx2_math.hpp"
#include "uavplace/kernels.hpp"

namespace uavplace::kernels::detail {

namespace {

constexpr std::size_t kLanes = 4;

struct LaneResult {
  __m256d q;
  __m256d slope;
};

template <bool kWantSlope>
inline LaneResult rayleigh_lanes(__m256d x, __m256d y, bool two_d, const Point& u,
                                 const RayleighKernel& k) {
  const __m256d dx = _mm256_sub_pd(x, _mm256_set1_pd(u[0]));
  __m256d s = _mm256_fmadd_pd(dx, dx, _mm256_set1_pd(k.h2));
  if (two_d) {
    const __m256d dy = _mm256_sub_pd(y, _mm256_set1_pd(u[1]));
    s = _mm256_fmadd_pd(dy, dy, s);
  }
  const __m256d zero = _mm256_setzero_pd();
  const __m256d tiny = _mm256_cmp_pd(s, _mm256_set1_pd(1e-300), _CMP_LT_OQ);
  s = _mm256_blendv_pd(s, zero, tiny);

  const __m256d lambda = _mm256_set1_pd(k.lambda);
  __m256d t;
  if (k.half_r == 1.0) {
    t = _mm256_mul_pd(lambda, s);
  } else {
    const __m256d safe = _mm256_blendv_pd(s, _mm256_set1_pd(1.0), tiny);
    const __m256d power =
        avx2::exp_pair(_mm256_mul_pd(_mm256_set1_pd(k.half_r), avx2::log(safe))).exp;
    t = _mm256_blendv_pd(_mm256_mul_pd(lambda, power), zero, tiny);
  }
  const avx2::ExpPair e = avx2::exp_pair(_mm256_sub_pd(zero, t));
  LaneResult out;
  out.q = _mm256_sub_pd(zero, e.expm1);
  if constexpr (kWantSlope) {
    const __m256d safe_s = _mm256_blendv_pd(s, _mm256_set1_pd(1.0), tiny);
    const __m256d ratio = _mm256_div_pd(t, safe_s);
    const __m256d slope =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0 * k.half_r), ratio), e.exp);
    out.slope = _mm256_blendv_pd(slope, zero, tiny);
  } else {
    out.slope = zero;
  }
  return out;
}

// Runs body(x, y, offset, count) over full and padded trailing lanes.
template <class Body>
inline void for_each_lane_block(NodeView nodes, const Point& u, Body&& body) {
  const std::size_t n = nodes.size();
  const bool two_d = nodes.dim() == 2;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(nodes.xs.data() + i);
    const __m256d y = two_d ? _mm256_loadu_pd(nodes.ys.data() + i) : _mm256_setzero_pd();
    body(x, y, i, kLanes);
  }
  if (i < n) {
    std::array<double, kLanes> px{u[0], u[0], u[0], u[0]};
    std::array<double, kLanes> py{u[1], u[1], u[1], u[1]};
    for (std::size_t j = i; j < n; ++j) {
      px[j - i] = nodes.xs[j];
      if (two_d) py[j - i] = nodes.ys[j];
    }
    body(_mm256_loadu_pd(px.data()), _mm256_loadu_pd(py.data()), i, n - i);
  }
}

}  // namespace

void multiply_rayleigh_outage_avx2(NodeView nodes, const Point& u, const RayleighKernel& k,
                                   std::span<double> prod) {
  const bool two_d = nodes.dim() == 2;
  for_each_lane_block(nodes, u, [&](__m256d x, __m256d y, std::size_t at, std::size_t count) {
    const LaneResult r = rayleigh_lanes<false>(x, y, two_d, u, k);
    if (count == kLanes) {
      _mm256_storeu_pd(prod.data() + at,
                       _mm256_mul_pd(_mm256_loadu_pd(prod.data() + at), r.q));
    } else {
      alignas(32) std::array<double, kLanes> q{};
      _mm256_store_pd(q.data(), r.q);
      for (std::size_t j = 0; j < count; ++j) prod[at + j] *= q[j];
    }
  });
}

void rayleigh_outage_and_slope_avx2(NodeView nodes, const Point& u, const RayleighKernel& k,
                                    std::span<double> q, std::span<double> slope) {
  const bool two_d = nodes.dim() == 2;
  for_each_lane_block(nodes, u, [&](__m256d x, __m256d y, std::size_t at, std::size_t count) {
    const LaneResult r = rayleigh_lanes<true>(x, y, two_d, u, k);
    if (count == kLanes) {
      _mm256_storeu_pd(q.data() + at, r.q);
      _mm256_storeu_pd(slope.data() + at, r.slope);
    } else {
      alignas(32) std::array<double, kLanes> qa{}, sa{};
      _mm256_store_pd(qa.data(), r.q);
      _mm256_store_pd(sa.data(), r.slope);
      for (std::size_t j = 0; j < count; ++j) {
        q[at + j] = qa[j];
        slope[at + j] = sa[j];
      }
    }
  });
}

}  // namespace uavplace::kernels::detail
