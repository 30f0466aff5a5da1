/* ---------------------------------------------------------------------------
 * hermite_kernels_avx2.cpp -- AVX2/FMA variant of the batched Hermite table.
 *
 * Four abscissae per register set.  Operation order matches the scalar
 * reference exactly (mul, mul, fmsub; power-of-two renormalization), so the
 * outputs are bitwise identical -- asserted by the equivalence tests.
 * Remainder lanes (n mod 4) run the shared scalar step.
 *
 * This translation unit is compiled with -mavx2 -mfma and must only be
 * entered when CPUID reports both features (see simd_dispatch.cpp).
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <cstddef>

#include "minors/simd.hpp"

#include "hermite_step_detail.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace minors::simd {

namespace {

using detail::kInvPiQuarter;
using detail::kRenormHi;
using detail::kRenormLo;
using detail::kRenormLog;
using detail::kSqrt2;

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

}  // namespace

void psihat_table_avx2(const double* x, std::size_t n, int jmax, double* mant,
                       double* offs) {
  if (jmax <= 0 || n == 0) return;
  const std::size_t n4 = n - (n % 4);

  for (std::size_t i = 0; i < n4; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d voff = _mm256_mul_pd(_mm256_set1_pd(-0.5), _mm256_mul_pd(vx, vx));
    __m256d vprev = _mm256_setzero_pd();
    __m256d vcur = _mm256_set1_pd(kInvPiQuarter);
    _mm256_storeu_pd(mant + i, vcur);
    _mm256_storeu_pd(offs + i, voff);
    if (jmax == 1) continue;
    {
      // m1 = (sqrt2 * x) * cur, same rounding order as the scalar path
      __m256d t = _mm256_mul_pd(_mm256_set1_pd(kSqrt2), vx);
      __m256d m1 = _mm256_mul_pd(t, vcur);
      vprev = vcur;
      vcur = m1;
      _mm256_storeu_pd(mant + n + i, vcur);
      _mm256_storeu_pd(offs + n + i, voff);
    }
    for (int j = 2; j < jmax; ++j) {
      double aj = std::sqrt(2.0 / static_cast<double>(j));
      double bj = std::sqrt(static_cast<double>(j - 1) / static_cast<double>(j));
      __m256d ax = _mm256_mul_pd(_mm256_set1_pd(aj), vx);
      __m256d bp = _mm256_mul_pd(_mm256_set1_pd(bj), vprev);
      __m256d nxt = _mm256_fmsub_pd(ax, vcur, bp);
      vprev = vcur;
      vcur = nxt;
      if ((j & 7) == 7) {
        __m256d m = _mm256_max_pd(abs_pd(vcur), abs_pd(vprev));
        __m256d hi_mask = _mm256_cmp_pd(m, _mm256_set1_pd(kRenormHi), _CMP_GT_OQ);
        __m256d lo_mask = _mm256_and_pd(
            _mm256_cmp_pd(m, _mm256_set1_pd(kRenormLo), _CMP_LT_OQ),
            _mm256_cmp_pd(m, _mm256_setzero_pd(), _CMP_GT_OQ));
        // scale = 2^-600 where hi, 2^+600 where lo, else 1 (exact products)
        __m256d scale = _mm256_set1_pd(1.0);
        scale = _mm256_blendv_pd(scale, _mm256_set1_pd(kRenormLo), hi_mask);
        scale = _mm256_blendv_pd(scale, _mm256_set1_pd(kRenormHi), lo_mask);
        __m256d dlog = _mm256_setzero_pd();
        dlog = _mm256_blendv_pd(dlog, _mm256_set1_pd(kRenormLog), hi_mask);
        dlog = _mm256_blendv_pd(dlog, _mm256_set1_pd(-kRenormLog), lo_mask);
        vcur = _mm256_mul_pd(vcur, scale);
        vprev = _mm256_mul_pd(vprev, scale);
        // blend instead of adding a zero delta: off + 0.0 would turn the
        // -0.0 offset of an x = 0 lane into +0.0 and break bitwise equality
        __m256d trig = _mm256_or_pd(hi_mask, lo_mask);
        voff = _mm256_blendv_pd(voff, _mm256_add_pd(voff, dlog), trig);
      }
      _mm256_storeu_pd(mant + (std::size_t)j * n + i, vcur);
      _mm256_storeu_pd(offs + (std::size_t)j * n + i, voff);
    }
  }

  // remainder lanes: shared scalar step (bitwise identical semantics)
  for (std::size_t i = n4; i < n; ++i) {
    double off = -0.5 * x[i] * x[i];
    double prev = 0.0;
    double cur = kInvPiQuarter;
    mant[i] = cur;
    offs[i] = off;
    if (jmax == 1) continue;
    double m1 = (kSqrt2 * x[i]) * cur;
    prev = cur;
    cur = m1;
    mant[n + i] = cur;
    offs[n + i] = off;
    for (int j = 2; j < jmax; ++j) {
      double aj = std::sqrt(2.0 / static_cast<double>(j));
      double bj = std::sqrt(static_cast<double>(j - 1) / static_cast<double>(j));
      detail::step_point(aj, bj, x[i], prev, cur, off, (j & 7) == 7);
      mant[(std::size_t)j * n + i] = cur;
      offs[(std::size_t)j * n + i] = off;
    }
  }
}

}  // namespace minors::simd

#else
#error "hermite_kernels_avx2.cpp requires -mavx2 -mfma"
#endif
