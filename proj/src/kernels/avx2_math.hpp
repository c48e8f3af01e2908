// SPDX-License-Identifier: Apache-2.0
// Four-lane double-precision exp/expm1/log for AVX2+FMA. Only included by
// translation units compiled with -mavx2 -mfma.
#pragma once

#include <immintrin.h>

namespace uavplace::kernels::avx2 {

// Integer <-> double for integral values with |v| < 2^51, using the
// 1.5 * 2^52 mantissa trick (AVX2 has no 64-bit integer conversions).
inline __m256d int_to_double(__m256i v) {
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, _mm256_castpd_si256(magic))),
                       magic);
}

inline __m256i double_to_int(__m256d integral) {
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(integral, magic)),
                          _mm256_castpd_si256(magic));
}

struct ExpPair {
  __m256d exp;
  __m256d expm1;
};

/// exp(x) and expm1(x) sharing one range reduction x = k ln2 + r, |r| <= ln2/2.
/// Lanes below -708 flush to (0, -1).
inline ExpPair exp_pair(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // expm1(r) = r + r^2 (1/2! + r/3! + ... + r^11/13!)
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  const __m256d em1r = _mm256_fmadd_pd(p, _mm256_mul_pd(r, r), r);

  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d two_k =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(double_to_int(k), bias), 52));
  const __m256d one = _mm256_set1_pd(1.0);
  ExpPair out;
  out.exp = _mm256_fmadd_pd(two_k, em1r, two_k);
  out.expm1 = _mm256_fmadd_pd(two_k, em1r, _mm256_sub_pd(two_k, one));
  out.exp = _mm256_blendv_pd(out.exp, _mm256_setzero_pd(), underflow);
  out.expm1 = _mm256_blendv_pd(out.expm1, _mm256_set1_pd(-1.0), underflow);
  return out;
}

/// Natural log for positive normal lanes.
inline __m256d log(__m256d s) {
  const __m256i bits = _mm256_castpd_si256(s);
  __m256i e = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FF0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.41421356237309504880), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_sub_epi64(e, _mm256_castpd_si256(big));  // all-ones lane == -1

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(f, f);
  // log m = 2 f sum_{j=0}^{10} z^j / (2j + 1)
  __m256d p = _mm256_set1_pd(1.0 / 21.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 3.0));
  const __m256d two_f = _mm256_add_pd(f, f);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_f, z), p, two_f);

  const __m256d ed = int_to_double(e);
  const __m256d low = _mm256_fmadd_pd(ed, _mm256_set1_pd(1.90821492927058770002e-10), log_m);
  return _mm256_fmadd_pd(ed, _mm256_set1_pd(6.93147180369123816490e-01), low);
}

}  // namespace uavplace::kernels::avx2
