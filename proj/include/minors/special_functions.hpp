/* ---------------------------------------------------------------------------
 * special_functions.hpp -- Hermite wave functions, Airy function, normal tail.
 *
 * Conventions (physicists' Hermite polynomials H_j, weight e^{-x^2}):
 *
 *     N_j    = 2^j j! sqrt(pi)                  (normalizer, log-carried)
 *     Psi_j  = e^{-x^2} H_j(x)                  for j >= 0
 *     Psi_-1 = int_x^inf e^{-y^2} dy,  Psi_{j-1} = int_x^inf Psi_j(y) dy
 *     Phi_j  = H_j(x) / N_j                     for j >= 0 only
 *     hhat_j = H_j(x) e^{-x^2/2} / sqrt(N_j)    (orthonormal on dx)
 *
 * so that Psi_j = hhat_j sqrt(N_j) e^{-x^2/2} and Phi_j = hhat_j e^{+x^2/2}
 * / sqrt(N_j).  Everything overflow-prone is exposed log-scaled.
 * ------------------------------------------------------------------------- */
#pragma once

#include <vector>

#include "minors/log_scale.hpp"

namespace minors {

// ln N_j = j ln 2 + ln j! + (1/2) ln pi, valid for j >= 0.
double ln_normalizer(long j);

// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
// Plain product below x = 15, Laplace continued fraction beyond.
double erfcx_pos(double x);

// Pr[Z > z] for standard normal Z; relative error <= 1e-10 for z <= 8.
double normal_sf(double z);

// Hermite wave function Psi_j(x), any integer j (see header comment).
LogScaledValue psi(long j, double x);

// Phi_j(x) = H_j(x)/N_j; negative j is a contract violation (throws
// std::domain_error).
LogScaledValue phi(long j, double x);

// Airy function Ai(x) to ~1e-12 absolute error.  Double-double Maclaurin
// series for |x| <= 8.5, asymptotic expansions beyond.  Domain x >= -30
// (throws std::domain_error below; the asymptotic phase loses accuracy).
double airy_ai(double x);

// ln Psi_{-m}(x) for m = 1..mmax (all values are positive, so only the log
// is returned).  Three regimes: upward recurrence from the erfc seed for
// x <= 0; for x > 0 a saddle-point Gauss-Legendre evaluation of the two top
// integrals seeds the (stable) downward recurrence
//     Psi_{-(k-1)} = 2k Psi_{-(k+1)} + 2x Psi_{-k}.
std::vector<double> psi_neg_log_table(double x, int mmax);

// Orthonormal Hermite function table hhat_j(x_i) for j in [0, jmax), all
// points at once, returned as ln|value| (log) and sign (sgn) in j-major
// layout log[j*n+i].  Thin wrapper over the dispatched batched kernel.
struct PsihatTable {
  int jmax = 0;
  std::size_t n = 0;
  std::vector<double> log;   // ln |hhat_j(x_i)|, -inf when value == 0
  std::vector<double> sign;  // -1, 0, +1

  double ln(int j, std::size_t i) const { return log[(std::size_t)j * n + i]; }
  double sg(int j, std::size_t i) const { return sign[(std::size_t)j * n + i]; }
};

PsihatTable psihat_log_table(const std::vector<double>& x, int jmax);

// Convenience: plain values hhat_j(x_i) (underflow decays to 0 harmlessly),
// same layout as PsihatTable::log.
std::vector<double> psihat_values(const std::vector<double>& x, int jmax);

}  // namespace minors
