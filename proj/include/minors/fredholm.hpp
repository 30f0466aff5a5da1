/* ---------------------------------------------------------------------------
 * fredholm.hpp -- Nystrom-discretized Fredholm determinants.
 *
 * Gap probabilities of the determinantal minor process:
 *
 *     Pr[max on line u <= t]                  = det(I - Ktilde |_[t,inf))
 *     Pr[line u1 <= t1 and line u2 <= t2]     = det(I - block operator)
 *     Tracy-Widom F2(s)                       = det(I - K_Airy |_[s,inf))
 *
 * All public inputs/outputs use scaled coordinates; the line measures
 * dy/(sqrt(2) u^{1/6}) are absorbed into the quadrature weights during
 * block assembly.  Single-line and Airy restrictions are symmetric positive
 * semidefinite, so their determinants go through the eigenvalue route
 * (sum log1p(-lambda), survival via expm1 keeps the deep right tail exact);
 * the two-line block determinant uses pivoted LU.
 * ------------------------------------------------------------------------- */
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "minors/quadrature.hpp"

namespace minors {

// Thrown when two quadrature refinement levels disagree beyond tolerance or
// an iterative stage fails to settle; the CLI maps it to exit code 2.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what)
      : std::runtime_error(what) {}
};

struct FredholmOptions {
  int order = 48;                 // Gauss-Legendre nodes per line
  double length = 0.0;            // 0 => default_truncation_length(t)
  bool check_convergence = false; // re-evaluate at 1.5x order and compare
  double convergence_tol = 1e-8;  // absolute disagreement allowed
};

// certified desk-scale line range for determinant computations
inline constexpr long kMaxCertifiedLine = 1024;

struct SingleLineResult {
  double cdf = 0.0;        // det(I - K|_[t, t+L])
  double survival = 0.0;   // 1 - cdf computed as -expm1(log det)
  double log_det = 0.0;    // sum log1p(-lambda_i)
};

SingleLineResult single_line(long u, double t, const FredholmOptions& opt = {});

// Pr[lambda^(u) <= t]; throws std::domain_error for u outside [1, 1024] or
// t < -10, NonConvergence per options.
double single_line_cdf(long u, double t, const FredholmOptions& opt = {});

// Pr[line u1 <= t1 and line u2 <= t2] via the 2x2 block determinant.
// decorrelate substitutes the decorrelated kernel (lower cross block zero).
double joint_cdf(long u1, double t1, long u2, double t2,
                 const FredholmOptions& opt = {}, bool decorrelate = false);

struct DecorrelationResult {
  double joint = 0.0;
  double marginal1 = 0.0;
  double marginal2 = 0.0;
  double E_cdf_form = 0.0;       // |joint - m1 m2|
  double E_survival_form = 0.0;  // |Pr[both exceed] - S1 S2|
};

// E(u1,t1;u2,t2) = |joint - product of marginals| in both algebraic forms.
DecorrelationResult decorrelation_E(long u1, double t1, long u2, double t2,
                                    const FredholmOptions& opt = {});

// F(u1,t1;u2,t2) = Pr[line u1 >= t1 and line u2 < t2] = cdf2 - joint;
// requires u1 < u2 (throws std::domain_error).
double correlation_F(long u1, double t1, long u2, double t2,
                     const FredholmOptions& opt = {});

struct TracyWidomResult {
  double cdf = 0.0;
  double survival = 0.0;
  double log_det = 0.0;
};

// Tracy-Widom GUE distribution F2(s) for s in [-8, 10].
TracyWidomResult tracy_widom(double s, const FredholmOptions& opt = {});
double tracy_widom_cdf(double s, const FredholmOptions& opt = {});

// Trace sandwich for the right tail on line u at threshold t >= 0:
//     1 - e^{-tr}  <=  Pr[lambda^(u) > t]  <=  tr,
// where tr = int_t^inf Ktilde(y,y) dmu.  Returns (lower, upper) = (:, tr).
std::pair<double, double> trace_bounds(long u, double t,
                                       const FredholmOptions& opt = {});

}  // namespace minors
