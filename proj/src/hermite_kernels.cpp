/* ---------------------------------------------------------------------------
 * hermite_kernels.cpp -- scalar reference implementation of the batched
 * orthonormal Hermite recurrence table.
 *
 * Carries hhat_j(x) as mant * e^{offs} with offs seeded at -x^2/2 and
 * adjusted by exact powers of two (2^±600) whenever the mantissa pair
 * leaves [2^-600, 2^600]; the renormalization check runs every 8 steps.
 * The arithmetic is arranged so the AVX2 variant produces bitwise identical
 * tables: one rounding for a_j*x, one for b_j*prev, one fused multiply-add.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <cstddef>

#include "minors/simd.hpp"

#include "hermite_step_detail.hpp"

namespace minors::simd {

void psihat_table_scalar(const double* x, std::size_t n, int jmax,
                         double* mant, double* offs) {
  using namespace detail;
  if (jmax <= 0 || n == 0) return;
  for (std::size_t i = 0; i < n; ++i) {
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
      step_point(aj, bj, x[i], prev, cur, off, (j & 7) == 7);
      mant[(std::size_t)j * n + i] = cur;
      offs[(std::size_t)j * n + i] = off;
    }
  }
}

}  // namespace minors::simd
