/* ---------------------------------------------------------------------------
 * hermite_step_detail.hpp -- shared per-point recurrence step (internal).
 *
 * Included by both the scalar and the AVX2 translation units so remainder
 * lanes and the reference implementation share one definition.  All
 * operations are plain IEEE double ops plus one correctly-rounded fma, so
 * results are bitwise identical across instruction sets.
 * ------------------------------------------------------------------------- */
#pragma once

#include <cmath>

namespace minors::simd::detail {

constexpr double kInvPiQuarter = 0.75112554446494248286;  // pi^{-1/4}
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kRenormHi = 0x1p600;
constexpr double kRenormLo = 0x1p-600;
constexpr double kRenormLog = 600.0 * 0.69314718055994530942;  // ln 2^600

// Advance one point from row j-1 to row j; renormalize on marked steps.
inline void step_point(double aj, double bj, double x, double& prev,
                       double& cur, double& off, bool renorm_step) {
  double ax = aj * x;
  double bp = bj * prev;
  double nxt = std::fma(ax, cur, -bp);
  prev = cur;
  cur = nxt;
  if (renorm_step) {
    double m = std::fmax(std::fabs(cur), std::fabs(prev));
    if (m > kRenormHi) {
      cur *= kRenormLo;
      prev *= kRenormLo;
      off += kRenormLog;
    } else if (m < kRenormLo && m > 0.0) {
      cur *= kRenormHi;
      prev *= kRenormHi;
      off -= kRenormLog;
    }
  }
}

}  // namespace minors::simd::detail
