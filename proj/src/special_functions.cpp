/* ---------------------------------------------------------------------------
 * special_functions.cpp -- Hermite wave functions, Airy function, normal tail.
 *
 * The positive-index families ride on the batched orthonormal recurrence
 * (simd::psihat_table); a single-point call is just a batch of one, so the
 * scalar values agree bit for bit with the tables used in the determinant
 * assembly.  The negative-index family Psi_{-m} (iterated tail integrals of
 * the Gaussian) has no stable single recurrence direction across the real
 * line, so it is split into three regimes:
 *
 *   x <= 0 : upward recurrence from the erfc seed; every term is positive
 *            and the recursion only adds positive quantities -- stable.
 *   x > 0  : upward recursion subtracts nearly equal quantities and blows
 *            up in relative error within a few steps.  Instead the two
 *            deepest members are evaluated directly by saddle-point
 *            Gauss-Legendre quadrature of
 *                Psi_{-m}(x) = e^{-x^2}/(m-1)! int_0^inf t^{m-1}
 *                              e^{-t^2-2xt} dt,
 *            and the identity Psi_{-(k-1)} = 2k Psi_{-(k+1)} + 2x Psi_{-k}
 *            (all coefficients positive for x > 0) recurses DOWNWARD, which
 *            is the dominant-solution direction and therefore stable.  The
 *            walk ends at m = 1 where a closed form is known; the two are
 *            compared and a mismatch beyond 1e-9 raises an exception rather
 *            than returning silently wrong numbers.
 *
 * Ai(x) uses the Maclaurin series in double-double arithmetic up to
 * |x| = 8.5 (the series suffers ~2e16-fold cancellation near the switch,
 * which double-double absorbs) and the standard asymptotic expansions
 * beyond, truncated at their smallest term.
 * ------------------------------------------------------------------------- */
#include "minors/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "minors/dd.hpp"
#include "minors/quadrature.hpp"
#include "minors/simd.hpp"

namespace minors {

namespace {

constexpr double kLn2 = 0.69314718055994530942;            // ln 2
constexpr double kLnPi = 1.1447298858494001741;            // ln pi
constexpr double kLnSqrtPiOver2 = -0.12078223763524522235; // ln(sqrt(pi)/2)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

/* --- negative-index family ---------------------------------------------- */

// ln Psi_{-m}(x) for x > 0 by direct quadrature after the substitution
// y = x + t.  The integrand exp(g(t)) with g(t) = (m-1) ln t - t^2 - 2xt is
// log-concave (g'' <= -2 everywhere), so covering max(10 sigma, 7) units of
// t around the interior maximum t* bounds the dropped tails by
// e^{-2*7^2/2} ~ 3e-22 relative.
double ln_psi_neg_quad(int m, double x) {
  if (m == 1)  // Psi_{-1}(x) = (sqrt(pi)/2) e^{-x^2} erfcx(x)
    return kLnSqrtPiOver2 - x * x + std::log(erfcx_pos(x));

  const double p = static_cast<double>(m - 1);
  const double tstar = 0.5 * (-x + std::sqrt(x * x + 2.0 * p));
  const double sigma = 1.0 / std::sqrt(p / (tstar * tstar) + 2.0);
  const double reach = std::max(10.0 * sigma, 7.0);
  const double lo = std::max(tstar - reach, 0.0);
  const double hi = tstar + reach;

  const auto g = [&](double t) { return p * std::log(t) - t * t - 2.0 * x * t; };
  const double gmax = g(tstar);

  static thread_local std::vector<double> gl_nodes, gl_weights;
  if (gl_nodes.empty()) gauss_legendre(20, gl_nodes, gl_weights);

  // Panels must resolve the integrand's natural scale sigma, which shrinks
  // like 1/(2x) for small m: unit-width panels lose the m = 1 self-check
  // beyond x ~ 14 (order-20 nodes cannot track e^{-2xt} across ~2x nats).
  // Two-sigma panels keep the per-panel variation at a couple of nats.
  const double panel_w = std::min(1.0, 2.0 * sigma);
  const int npan =
      std::max(6, static_cast<int>(std::ceil((hi - lo) / panel_w)));
  const double h = (hi - lo) / npan;
  double acc = 0.0;
  for (int pnl = 0; pnl < npan; ++pnl) {
    const double a = lo + pnl * h;
    const double c = a + 0.5 * h;
    for (std::size_t q = 0; q < gl_nodes.size(); ++q) {
      const double t = c + 0.5 * h * gl_nodes[q];
      acc += 0.5 * h * gl_weights[q] * std::exp(g(t) - gmax);
    }
  }
  return -x * x - std::lgamma(static_cast<double>(m)) + gmax + std::log(acc);
}

}  // namespace

/* --- normalizer and error functions -------------------------------------- */

double ln_normalizer(long j) {
  if (j < 0) throw std::domain_error("ln_normalizer: j must be >= 0");
  return static_cast<double>(j) * kLn2 +
         std::lgamma(static_cast<double>(j) + 1.0) + 0.5 * kLnPi;
}

double erfcx_pos(double x) {
  if (x < 0.0) throw std::domain_error("erfcx_pos: x must be >= 0");
  if (x <= 15.0) return std::exp(x * x) * std::erfc(x);
  // Laplace continued fraction erfcx(x) = 1/sqrt(pi) * 1/(x+ (1/2)/(x+ 1/(x+
  // (3/2)/(x+ ...)))); 16 rungs give full precision for x > 15.
  double r = 0.0;
  for (int k = 16; k >= 1; --k) r = (0.5 * k) / (x + r);
  return 0.56418958354775628695 / (x + r);  // 1/sqrt(pi)
}

double normal_sf(double z) {
  return 0.5 * std::erfc(z * 0.70710678118654752440);  // z / sqrt(2)
}

/* --- Hermite wave functions ---------------------------------------------- */

std::vector<double> psi_neg_log_table(double x, int mmax) {
  if (mmax < 1) throw std::invalid_argument("psi_neg_log_table: mmax >= 1");
  std::vector<double> out(static_cast<std::size_t>(mmax));

  if (x <= 0.0) {
    // Upward from the closed seeds; all summands positive.
    out[0] = kLnSqrtPiOver2 + std::log(std::erfc(x));  // erfc in [1, 2]
    if (mmax >= 2) {
      // Psi_{-2} = e^{-x^2}/2 - x Psi_{-1}; both terms >= 0 here.  The
      // exp(-x^2) half may underflow near x = -30, harmlessly: the other
      // term then dominates by hundreds of orders of magnitude.
      out[1] = std::log(0.5 * std::exp(-x * x) - x * std::exp(out[0]));
    }
    const double ln_mx = (x < 0.0) ? std::log(-x) : kNegInf;
    for (int m = 3; m <= mmax; ++m) {
      // Psi_{-m} = ( -x Psi_{-(m-1)} + Psi_{-(m-2)}/2 ) / (m-1)
      const double a = ln_mx + out[m - 2];
      const double b = out[m - 3] - kLn2;
      out[m - 1] = logaddexp(a, b) - std::log(static_cast<double>(m - 1));
    }
    return out;
  }

  // x > 0: seed the two deepest members by quadrature, recurse downward.
  if (mmax == 1) {
    out[0] = ln_psi_neg_quad(1, x);
    return out;
  }
  double deeper = ln_psi_neg_quad(mmax + 1, x);  // ln Psi_{-(k+1)}
  double here = ln_psi_neg_quad(mmax, x);        // ln Psi_{-k}
  out[mmax - 1] = here;
  const double ln_2x = std::log(2.0 * x);
  for (int k = mmax; k >= 2; --k) {
    // Psi_{-(k-1)} = 2k Psi_{-(k+1)} + 2x Psi_{-k}
    out[k - 2] = logaddexp(std::log(2.0 * k) + deeper, ln_2x + here);
    deeper = here;
    here = out[k - 2];
  }
  // The walk must land on the closed form at m = 1; disagreement means the
  // quadrature seeds were bad and every entry is suspect.
  const double direct = ln_psi_neg_quad(1, x);
  if (std::fabs(out[0] - direct) > 1e-9)
    throw std::runtime_error(
        "psi_neg_log_table: downward recurrence failed self-check at m = 1 "
        "(x = " + std::to_string(x) + ")");
  return out;
}

LogScaledValue psi(long j, double x) {
  if (j < 0) {
    const int m = static_cast<int>(-j);
    const std::vector<double> tab = psi_neg_log_table(x, m);
    return LogScaledValue::from_log(+1, tab[m - 1]);
  }
  // Psi_j = hhat_j sqrt(N_j) e^{-x^2/2}
  double mant = 0.0, offs = 0.0;
  const int jmax = static_cast<int>(j) + 1;
  std::vector<double> mants(static_cast<std::size_t>(jmax));
  std::vector<double> offss(static_cast<std::size_t>(jmax));
  simd::psihat_table(&x, 1, jmax, mants.data(), offss.data());
  mant = mants[static_cast<std::size_t>(j)];
  offs = offss[static_cast<std::size_t>(j)];
  if (mant == 0.0) return LogScaledValue::zero();
  const double lm =
      std::log(std::fabs(mant)) + offs + 0.5 * ln_normalizer(j) - 0.5 * x * x;
  return LogScaledValue::from_log(mant > 0.0 ? +1 : -1, lm);
}

LogScaledValue phi(long j, double x) {
  if (j < 0)
    throw std::domain_error("phi: index must be >= 0 (the polynomial family "
                            "has no negative members)");
  // Phi_j = hhat_j e^{+x^2/2} / sqrt(N_j)
  const int jmax = static_cast<int>(j) + 1;
  std::vector<double> mants(static_cast<std::size_t>(jmax));
  std::vector<double> offss(static_cast<std::size_t>(jmax));
  simd::psihat_table(&x, 1, jmax, mants.data(), offss.data());
  const double mant = mants[static_cast<std::size_t>(j)];
  const double offs = offss[static_cast<std::size_t>(j)];
  if (mant == 0.0) return LogScaledValue::zero();
  const double lm =
      std::log(std::fabs(mant)) + offs - 0.5 * ln_normalizer(j) + 0.5 * x * x;
  return LogScaledValue::from_log(mant > 0.0 ? +1 : -1, lm);
}

/* --- Airy function -------------------------------------------------------- */

namespace {

// Maclaurin series in double-double.  Ai(x) = c1 f(x) - c2 g(x) with
//   f = sum x^{3k} prod, term ratio x^3 / ((3k+2)(3k+3)),
//   g = x * (term ratio x^3 / ((3k+3)(3k+4))).
double airy_series(double x) {
  static const dd c1{0.35502805388781722, 2.0523363243621199e-17};   // Ai(0)
  static const dd c2{0.25881940379280682, -2.5222431116108321e-17};  // -Ai'(0)
  const dd x3 = dd(x) * x * x;
  dd f{1.0}, tf{1.0};
  dd g{x}, tg{x};
  for (int k = 0; k < 160; ++k) {
    tf = tf * x3 / static_cast<double>((3 * k + 2) * (3 * k + 3));
    tg = tg * x3 / static_cast<double>((3 * k + 3) * (3 * k + 4));
    f = f + tf;
    g = g + tg;
    if (std::fabs(tf.hi) < 1e-40 && std::fabs(tg.hi) < 1e-40) break;
  }
  return (c1 * f - c2 * g).to_double();
}

// Asymptotic coefficients u_k: u_0 = 1,
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k).
double airy_asymptotic_right(double x) {
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  double u = 1.0, term = 1.0, sum = 1.0, prev = std::fabs(term);
  for (int k = 1; k <= 60; ++k) {
    u *= static_cast<double>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
         (static_cast<double>(2 * k - 1) * 216.0 * k);
    term = ((k % 2) ? -u : u) / std::pow(zeta, k);
    if (std::fabs(term) >= prev) break;  // divergent tail reached
    sum += term;
    prev = std::fabs(term);
  }
  return std::exp(-zeta) * sum /
         (2.0 * 1.7724538509055160273 * std::pow(x, 0.25));  // sqrt(pi)
}

double airy_asymptotic_left(double x) {
  const double z = -x;
  const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  // Even-index u's modulate cos, odd-index modulate sin.
  double u = 1.0;
  std::vector<double> us{1.0};
  for (int k = 1; k <= 40; ++k) {
    u *= static_cast<double>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
         (static_cast<double>(2 * k - 1) * 216.0 * k);
    us.push_back(u);
  }
  double P = 0.0, prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k < us.size(); ++k) {
    const double term = ((k % 2) ? -1.0 : 1.0) * us[2 * k] /
                        std::pow(zeta, static_cast<double>(2 * k));
    if (std::fabs(term) >= prev) break;
    P += term;
    prev = std::fabs(term);
  }
  double Q = 0.0;
  prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < us.size(); ++k) {
    const double term = ((k % 2) ? -1.0 : 1.0) * us[2 * k + 1] /
                        std::pow(zeta, static_cast<double>(2 * k + 1));
    if (std::fabs(term) >= prev) break;
    Q += term;
    prev = std::fabs(term);
  }
  const double phase = zeta - 0.78539816339744830962;  // pi/4
  return (std::cos(phase) * P + std::sin(phase) * Q) /
         (1.7724538509055160273 * std::pow(z, 0.25));  // sqrt(pi)
}

}  // namespace

double airy_ai(double x) {
  if (x < -30.0)
    throw std::domain_error("airy_ai: x < -30 (asymptotic phase loses the "
                            "oscillation; restrict arguments to x >= -30)");
  if (std::fabs(x) <= 8.5) return airy_series(x);
  return (x > 0.0) ? airy_asymptotic_right(x) : airy_asymptotic_left(x);
}

/* --- batched orthonormal tables ------------------------------------------ */

PsihatTable psihat_log_table(const std::vector<double>& x, int jmax) {
  if (jmax < 1) throw std::invalid_argument("psihat_log_table: jmax >= 1");
  PsihatTable t;
  t.jmax = jmax;
  t.n = x.size();
  const std::size_t total = static_cast<std::size_t>(jmax) * t.n;
  std::vector<double> mant(total), offs(total);
  simd::psihat_table(x.data(), x.size(), jmax, mant.data(), offs.data());
  t.log.resize(total);
  t.sign.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const double m = mant[idx];
    if (m == 0.0) {
      t.log[idx] = kNegInf;
      t.sign[idx] = 0.0;
    } else {
      t.log[idx] = std::log(std::fabs(m)) + offs[idx];
      t.sign[idx] = (m > 0.0) ? 1.0 : -1.0;
    }
  }
  return t;
}

std::vector<double> psihat_values(const std::vector<double>& x, int jmax) {
  if (jmax < 1) throw std::invalid_argument("psihat_values: jmax >= 1");
  const std::size_t n = x.size();
  const std::size_t total = static_cast<std::size_t>(jmax) * n;
  std::vector<double> mant(total), offs(total), out(total);
  simd::psihat_table(x.data(), n, jmax, mant.data(), offs.data());
  // offs is piecewise constant along j for fixed i; cache the exp.
  for (std::size_t i = 0; i < n; ++i) {
    double last_offs = std::numeric_limits<double>::quiet_NaN();
    double scale = 0.0;
    for (int j = 0; j < jmax; ++j) {
      const std::size_t idx = static_cast<std::size_t>(j) * n + i;
      if (offs[idx] != last_offs) {
        last_offs = offs[idx];
        scale = std::exp(last_offs);
      }
      out[idx] = mant[idx] * scale;
    }
  }
  return out;
}

}  // namespace minors
