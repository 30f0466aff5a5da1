/* ---------------------------------------------------------------------------
 * minor_kernel.hpp -- the minor-process correlation kernel and its scalings.
 *
 * Lines are indexed by u >= 1 (minor size); a point on line u has unscaled
 * coordinate y and edge-scaled coordinate
 *
 *     ytilde = sqrt(2) u^{1/6} y - 2 u^{2/3},
 *     y      = sqrt(2u) + ytilde / (sqrt(2) u^{1/6}).
 *
 * Kernel (u2 >= 1):
 *
 *     K(u1,y1;u2,y2) = -phi^{(u1,u2)}(y1,y2)
 *                      + sum_{l=1}^{u2} Psi_{u1-l}(y1) Phi_{u2-l}(y2)
 *
 * with the transition function
 *
 *     phi^{(u1,u2)}(y1,y2) = (y2-y1)^{u2-u1-1}/(u2-u1-1)! * 1[y2>y1, u1<u2].
 *
 * The scaled kernel conjugates by J(u,y) = 2^u e^{u/2 (ln(u/2)+1) - sqrt(2u) y}:
 * Ktilde = (J(u2,y2)/J(u1,y1)) K, which is order one across the edge window.
 *
 * For u1 < u2 the transition function expands in the Hermite basis as
 * phi = sum_{l=-inf}^{u2} Psi_{u1-l} Phi_{u2-l}, so equivalently
 *
 *     K(u1,y1;u2,y2) = -sum_{m>=0} Psi_{u1+m}(y1) Phi_{u2+m}(y2).
 *
 * The two forms trade failure modes: the defining form cancels
 * catastrophically at wide separation (phi grows like e^{+60} while K stays
 * order one), the tail form converges geometrically with ratio
 * ~sqrt(u1/u2).  Evaluation keeps the defining form while its measured
 * cancellation noise floor stays below 1e-11 * max(1, |entry|) in the
 * conjugated scale, and falls back to the tail form otherwise.
 * ------------------------------------------------------------------------- */
#pragma once

#include <vector>

#include "minors/log_scale.hpp"

namespace minors {

struct LinePoint {
  long u = 1;      // line index (minor size), u >= 1
  double y = 0.0;  // unscaled eigenvalue coordinate
};

struct ScaledPoint {
  long u = 1;
  double y_tilde = 0.0;
};

ScaledPoint to_scaled(const LinePoint& p);
LinePoint from_scaled(const ScaledPoint& p);

// Transition function phi^{(u1,u2)}(y1,y2), log-scaled; zero when u1 >= u2
// or y2 <= y1.
LogScaledValue phi_transition(long u1, double y1, long u2, double y2);

// ln J(u, y); only ratios of J are ever decoded.
LogScaledValue scale_factor_J(long u, double y);
double ln_scale_factor_J(long u, double y);

// The kernel K(u1,y1;u2,y2) in unscaled coordinates, log-scaled (raw kernel
// values span hundreds of orders of magnitude).
LogScaledValue kernel_raw(long u1, double y1, long u2, double y2);

// The bare sum  sum_{l=1}^{u2} Psi_{u1-l}(y1) Phi_{u2-l}(y2)  on the same
// summation path as kernel_raw (exposed so the phi-cancellation identity
// K + phi == sum can be tested exactly).
LogScaledValue kernel_sum_part(long u1, double y1, long u2, double y2);

// Scaled kernel Ktilde at scaled coordinates; plain double (order one).
double kernel_scaled(long u1, double ytilde1, long u2, double ytilde2);

// Decorrelated kernel: Ktilde for u1 <= u2, zero otherwise.
double kernel_decorrelated(long u1, double ytilde1, long u2, double ytilde2);

// Airy kernel K_Ai(x,y) = int_0^inf Ai(x+w) Ai(y+w) dw, for x,y >= -15
// (throws std::domain_error outside), absolute truncation error < 1e-12.
double airy_kernel(double x, double y);

/* --- double-contour oracle ----------------------------------------------
 * Independent evaluation of K(u1,y1;u2,y2) for u1 >= u2 (both <= 512) as a
 * double contour integral steepest-descent quadrature; used only to
 * cross-validate kernel_raw.  Two refinement levels must agree to rel_tol,
 * otherwise NonConvergence is thrown.
 * ------------------------------------------------------------------------ */
struct ContourOptions {
  double panel_len = 0.4;  // panel length in rescaled contour units
  int panel_order = 16;    // Gauss-Legendre points per panel
  double rel_tol = 1e-8;   // refinement agreement requirement
};

LogScaledValue kernel_contour_oracle(long u1, double y1, long u2, double y2,
                                     const ContourOptions& opt = {});

/* --- batch evaluation for operator assembly -----------------------------
 * Cross-line block Ktilde(u_r, yr_i; u_c, yc_j) for all grid pairs, in
 * scaled-kernel normalization (J-conjugated), plain doubles.  Regime logic
 * identical to kernel_scaled but amortized over the grid via the batched
 * Hermite tables and a per-term balanced prescale.
 * ------------------------------------------------------------------------ */
std::vector<double> kernel_scaled_block(long u_row,
                                        const std::vector<double>& y_row,
                                        long u_col,
                                        const std::vector<double>& y_col);

// Same-line Gram block: K(u,y_i;u,y_j) = sum_{j<u} hhat hhat (the J factors
// cancel on a single line).  Symmetric positive semidefinite by
// construction.
std::vector<double> kernel_same_line_block(long u,
                                           const std::vector<double>& y);

}  // namespace minors
