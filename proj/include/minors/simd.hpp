/* ---------------------------------------------------------------------------
 * simd.hpp -- runtime-dispatched batched Hermite recurrence kernels.
 *
 * The hot inner loop of every kernel/determinant assembly is the three-term
 * recurrence for the orthonormal Hermite functions
 *
 *     hhat_0(x)   = pi^{-1/4} e^{-x^2/2}
 *     hhat_1(x)   = sqrt(2) x hhat_0(x)
 *     hhat_{j+1}  = sqrt(2/(j+1)) x hhat_j - sqrt(j/(j+1)) hhat_{j-1}
 *
 * evaluated for a whole batch of abscissae at once.  Values are carried as
 * mantissa * e^{offset} pairs: the offset starts at -x^2/2 (so the Gaussian
 * never underflows) and is adjusted by exact powers of two whenever the
 * mantissa leaves [2^-600, 2^600].  Output is the full table
 *
 *     mant[j*n + i], offs[j*n + i]   for j in [0, jmax), i in [0, n)
 *
 * with hhat_j(x_i) = mant * exp(offs).  A scalar reference kernel and an
 * AVX2 variant (separate translation unit, -mavx2 -mfma) produce bitwise
 * identical tables; the active backend is chosen at runtime from CPUID and
 * can be overridden via MINORS_SIMD=scalar|avx2 or set_backend().
 * ------------------------------------------------------------------------- */
#pragma once

#include <cstddef>
#include <string>

namespace minors::simd {

enum class Backend { scalar, avx2 };

using psihat_table_fn = void (*)(const double* x, std::size_t n, int jmax,
                                 double* mant, double* offs);

// Scalar reference implementation (always available).
void psihat_table_scalar(const double* x, std::size_t n, int jmax,
                         double* mant, double* offs);

#if defined(MINORS_HAVE_AVX2_TU)
// AVX2 implementation; call only when cpu_supports_avx2() is true.
void psihat_table_avx2(const double* x, std::size_t n, int jmax, double* mant,
                       double* offs);
#endif

bool cpu_supports_avx2();

Backend active_backend();
void set_backend(Backend b);       // test hook; normal code never calls this
std::string backend_name();

// Dispatched entry point used by the library.
void psihat_table(const double* x, std::size_t n, int jmax, double* mant,
                  double* offs);

}  // namespace minors::simd
