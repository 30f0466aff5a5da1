/* ---------------------------------------------------------------------------
 * minor_kernel.cpp -- kernel evaluation in both algebraic forms.
 *
 * Two evaluation regimes, switched on the noise floor the near form is
 * observed to leave behind:
 *
 *   near form:
 *       K = -phi + sum_{l=1}^{u2} Psi_{u1-l}(y1) Phi_{u2-l}(y2).
 *       Its noise floor is the largest magnitude that entered the
 *       cancellation times the component error eps * (scale of the logs):
 *       log-domain values carry ~eps * |ln| of absolute log error, so deep
 *       scales afford fewer retained nats than shallow ones.
 *
 *   tail form (only possible for u1 < u2):
 *       K = -sum_{m>=0} Psi_{u1+m}(y1) Phi_{u2+m}(y2),
 *       which sidesteps the transition function entirely; exactly when the
 *       near form cancels badly, these terms decay from m = 0 with no large
 *       cancellation.  The sum stops once 8 consecutive terms sit 40 nats
 *       below the running peak (the terms oscillate through zeros of the
 *       Hermite functions, so a single small term is not evidence of
 *       convergence).
 *
 * An entry keeps its near value while the noise floor stays below
 * 1e-11 * max(1, |entry|) in the conjugated scale, where in-window kernel
 * entries are order one; otherwise the tail form replaces it.  A fixed
 * threshold on phi alone misfires in both directions: it would route
 * points where the kernel itself dwarfs phi through the (there
 * ill-conditioned) tail sum, and it would trust the near form at deep log
 * scales where component noise eats the cancellation budget.
 *
 * Batch versions amortize the Hermite tables over the whole grid and keep
 * each rank-one term balanced: with la_l(i) = ln Psi - ln J(row) and
 * lb_l(j) = ln Phi + ln J(col), the split constant c_l = (max lb_l -
 * max la_l)/2 makes both factors of term l bounded by e^{T_l/2}, so the
 * product P Q never overflows and rounding stays relative to the largest
 * term.
 * ------------------------------------------------------------------------- */
#include "minors/minor_kernel.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "minors/fredholm.hpp"  // NonConvergence
#include "minors/quadrature.hpp"
#include "minors/special_functions.hpp"

namespace minors {

namespace {

constexpr double kLn2 = 0.69314718055994530942;  // ln 2
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = 2.2204460492503131e-16;  // double epsilon
// Near-form entries are kept only while their noise floor stays below
// 1e-11 * max(1, |entry|) in the conjugated (order-one) scale.
constexpr double kLnEntryTol = -25.328436022934504;  // ln 1e-11
constexpr int kTailCap = 3000;           // absolute tail-term budget
constexpr int kTailMinTerms = 16;
constexpr int kTailRunLength = 8;        // consecutive small terms required
constexpr double kTailDropNats = 40.0;   // "small" = peak - 40 nats

void require_lines(long u1, long u2) {
  if (u1 < 1 || u2 < 1)
    throw std::domain_error("kernel: line indices must be >= 1");
}

double sixth_root(long u) { return std::pow(static_cast<double>(u), 1.0 / 6.0); }

/* ln Psi_{u-l}(y) and sign for l = 1..terms, one point.  Positive indices
 * come from the orthonormal table, negative ones from the tail-integral
 * table. */
struct PsiColumn {
  std::vector<double> ln, sg;
};

PsiColumn psi_column(long u, double y, long terms) {
  PsiColumn col;
  col.ln.resize(static_cast<std::size_t>(terms));
  col.sg.resize(static_cast<std::size_t>(terms));
  const std::vector<double> x{y};
  const PsihatTable tab = psihat_log_table(x, static_cast<int>(u));
  const long mneg = std::max<long>(0, terms - u);
  std::vector<double> lneg;
  if (mneg > 0) lneg = psi_neg_log_table(y, static_cast<int>(mneg));
  for (long l = 1; l <= terms; ++l) {
    const long j = u - l;
    if (j >= 0) {
      col.ln[l - 1] = tab.ln(static_cast<int>(j), 0) + 0.5 * ln_normalizer(j) -
                      0.5 * y * y;
      col.sg[l - 1] = tab.sg(static_cast<int>(j), 0);
    } else {
      col.ln[l - 1] = lneg[static_cast<std::size_t>(-j) - 1];
      col.sg[l - 1] = 1.0;
    }
  }
  return col;
}

/* ln Phi_{u-l}(y) and sign for l = 1..u, one point (all indices >= 0). */
PsiColumn phi_column(long u, double y) {
  PsiColumn col;
  col.ln.resize(static_cast<std::size_t>(u));
  col.sg.resize(static_cast<std::size_t>(u));
  const std::vector<double> x{y};
  const PsihatTable tab = psihat_log_table(x, static_cast<int>(u));
  for (long l = 1; l <= u; ++l) {
    const long j = u - l;
    col.ln[l - 1] = tab.ln(static_cast<int>(j), 0) - 0.5 * ln_normalizer(j) +
                    0.5 * y * y;
    col.sg[l - 1] = tab.sg(static_cast<int>(j), 0);
  }
  return col;
}

// Single-point tail form: -sum_{m>=0} Psi_{u1+m}(y1) Phi_{u2+m}(y2),
// log-scaled accumulation with the run-length stopping rule.
LogScaledValue kernel_tail_form(long u1, double y1, long u2, double y2) {
  int extra = 256;
  while (true) {
    const int j1max = static_cast<int>(u1) + extra + 1;
    const int j2max = static_cast<int>(u2) + extra + 1;
    const PsihatTable t1 = psihat_log_table(std::vector<double>{y1}, j1max);
    const PsihatTable t2 = psihat_log_table(std::vector<double>{y2}, j2max);
    LogScaledValue acc = LogScaledValue::zero();
    double peak = kNegInf;
    int run = 0;
    for (int m = 0; m < extra; ++m) {
      const int ja = static_cast<int>(u1) + m;
      const int jb = static_cast<int>(u2) + m;
      const double la = t1.ln(ja, 0) + 0.5 * ln_normalizer(ja) - 0.5 * y1 * y1;
      const double lb = t2.ln(jb, 0) - 0.5 * ln_normalizer(jb) + 0.5 * y2 * y2;
      const double lt = la + lb;
      const double sg = t1.sg(ja, 0) * t2.sg(jb, 0);
      if (sg != 0.0) acc = acc + LogScaledValue::from_log(sg > 0 ? 1 : -1, lt);
      peak = std::max(peak, lt);
      run = (lt < peak - kTailDropNats) ? run + 1 : 0;
      if (m + 1 >= kTailMinTerms && run >= kTailRunLength) return -acc;
    }
    if (extra >= kTailCap)
      throw NonConvergence("kernel tail expansion did not converge within " +
                           std::to_string(kTailCap) + " terms");
    extra = std::min(2 * extra, kTailCap);
  }
}

}  // namespace

/* --- coordinate maps ------------------------------------------------------ */

ScaledPoint to_scaled(const LinePoint& p) {
  const double r = sixth_root(p.u);
  return ScaledPoint{p.u, 1.4142135623730950488 * r * p.y -
                              2.0 * r * r * r * r};  // sqrt(2) u^{1/6}, 2u^{2/3}
}

LinePoint from_scaled(const ScaledPoint& p) {
  const double r = sixth_root(p.u);
  return LinePoint{p.u, std::sqrt(2.0 * static_cast<double>(p.u)) +
                            p.y_tilde / (1.4142135623730950488 * r)};
}

/* --- transition function and conjugation ---------------------------------- */

LogScaledValue phi_transition(long u1, double y1, long u2, double y2) {
  if (u1 >= u2 || y2 <= y1) return LogScaledValue::zero();
  const long d = u2 - u1;
  const double lm = static_cast<double>(d - 1) * std::log(y2 - y1) -
                    std::lgamma(static_cast<double>(d));
  return LogScaledValue::from_log(+1, lm);
}

double ln_scale_factor_J(long u, double y) {
  const double uu = static_cast<double>(u);
  return uu * kLn2 + 0.5 * uu * (std::log(0.5 * uu) + 1.0) -
         std::sqrt(2.0 * uu) * y;
}

LogScaledValue scale_factor_J(long u, double y) {
  return LogScaledValue::from_log(+1, ln_scale_factor_J(u, y));
}

/* --- pointwise kernel ------------------------------------------------------ */

namespace {

// Near-form sum with the log of its largest term reported: the rounding
// noise of the whole near evaluation lives at max(peak, ln phi) - 36 nats.
LogScaledValue sum_part_peaked(long u1, double y1, long u2, double y2,
                               double* peak_ln) {
  const PsiColumn a = psi_column(u1, y1, u2);
  const PsiColumn b = phi_column(u2, y2);
  LogScaledValue acc = LogScaledValue::zero();
  double peak = kNegInf;
  for (long l = 0; l < u2; ++l) {
    const double sg = a.sg[l] * b.sg[l];
    if (sg == 0.0) continue;
    const double lt = a.ln[l] + b.ln[l];
    peak = std::max(peak, lt);
    acc = acc + LogScaledValue::from_log(sg > 0 ? 1 : -1, lt);
  }
  if (peak_ln != nullptr) *peak_ln = peak;
  return acc;
}

}  // namespace

LogScaledValue kernel_sum_part(long u1, double y1, long u2, double y2) {
  require_lines(u1, u2);
  return sum_part_peaked(u1, y1, u2, y2, nullptr);
}

LogScaledValue kernel_raw(long u1, double y1, long u2, double y2) {
  require_lines(u1, u2);
  const LogScaledValue lphi = phi_transition(u1, y1, u2, y2);
  double peak = kNegInf;
  const LogScaledValue near = sum_part_peaked(u1, y1, u2, y2, &peak) - lphi;
  if (u1 < u2) {
    const double raw_ref = std::max(peak, lphi.log_magnitude);
    if (raw_ref != kNegInf) {
      // Noise floor of the near form: the largest magnitude that entered the
      // cancellation times the component error, which grows with the depth
      // of the log scale (each log-domain value carries ~eps * |ln| of
      // absolute log error).  Everything is compared in the conjugated
      // scale, where kernel entries that matter are order one.
      const double jd =
          ln_scale_factor_J(u2, y2) - ln_scale_factor_J(u1, y1);
      const double comp = kEps * (2.0 + std::fabs(raw_ref) + std::fabs(jd));
      const double noise = raw_ref + jd + std::log(comp);
      const double sig =
          near.is_zero() ? 0.0 : std::max(0.0, near.log_magnitude + jd);
      if (noise > kLnEntryTol + sig) return kernel_tail_form(u1, y1, u2, y2);
    }
  }
  return near;
}

double kernel_scaled(long u1, double ytilde1, long u2, double ytilde2) {
  const LinePoint p1 = from_scaled(ScaledPoint{u1, ytilde1});
  const LinePoint p2 = from_scaled(ScaledPoint{u2, ytilde2});
  const LogScaledValue k = kernel_raw(u1, p1.y, u2, p2.y);
  if (k.is_zero()) return 0.0;
  const double lm = k.log_magnitude + ln_scale_factor_J(u2, p2.y) -
                    ln_scale_factor_J(u1, p1.y);
  return static_cast<double>(k.sign) * std::exp(lm);
}

double kernel_decorrelated(long u1, double ytilde1, long u2, double ytilde2) {
  return (u1 <= u2) ? kernel_scaled(u1, ytilde1, u2, ytilde2) : 0.0;
}

/* --- Airy kernel ----------------------------------------------------------- */

double airy_kernel(double x, double y) {
  if (x < -15.0 || y < -15.0)
    throw std::domain_error("airy_kernel: arguments must be >= -15");
  const double lo = std::min(x, y);
  const double W = 14.0 + std::max(0.0, -lo);  // dropped tail < 1e-12
  static thread_local std::vector<double> nodes, weights;
  if (nodes.empty()) gauss_legendre(24, nodes, weights);
  const int npan = static_cast<int>(std::ceil(W / 2.0));
  const double h = W / npan;
  double acc = 0.0;
  for (int p = 0; p < npan; ++p) {
    const double c = (p + 0.5) * h;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double w = c + 0.5 * h * nodes[q];
      acc += 0.5 * h * weights[q] * airy_ai(x + w) * airy_ai(y + w);
    }
  }
  return acc;
}

/* --- batch blocks ---------------------------------------------------------- */

namespace {

// ln Psi_{j}(y_i) table (positive j only) from the batched orthonormal
// recurrence; row j, point i.
struct LnPsiTable {
  PsihatTable hhat;
  std::vector<double> half_ln_n;  // 0.5 ln N_j
  std::vector<double> half_y2;    // 0.5 y_i^2

  LnPsiTable(const std::vector<double>& y, int jmax)
      : hhat(psihat_log_table(y, jmax)) {
    half_ln_n.resize(jmax);
    for (int j = 0; j < jmax; ++j) half_ln_n[j] = 0.5 * ln_normalizer(j);
    half_y2.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) half_y2[i] = 0.5 * y[i] * y[i];
  }

  double ln_psi(int j, std::size_t i) const {
    return hhat.ln(j, i) + half_ln_n[j] - half_y2[i];
  }
  double ln_phi(int j, std::size_t i) const {
    return hhat.ln(j, i) - half_ln_n[j] + half_y2[i];
  }
  double sg(int j, std::size_t i) const { return hhat.sg(j, i); }
};

std::vector<double> block_tail_form(long ur, const std::vector<double>& yr,
                                    const std::vector<double>& ljr, long uc,
                                    const std::vector<double>& yc,
                                    const std::vector<double>& ljc) {
  const std::size_t n = yr.size(), p = yc.size();
  std::vector<double> B(n * p, 0.0);
  std::vector<double> P(n), Q(p);
  int extra = 256;
  while (true) {
    const LnPsiTable ta(yr, static_cast<int>(ur) + extra + 1);
    const LnPsiTable tb(yc, static_cast<int>(uc) + extra + 1);
    std::fill(B.begin(), B.end(), 0.0);
    double peak = kNegInf;
    int run = 0;
    for (int m = 0; m < extra; ++m) {
      const int ja = static_cast<int>(ur) + m;
      const int jb = static_cast<int>(uc) + m;
      double la_max = kNegInf, lb_max = kNegInf;
      for (std::size_t i = 0; i < n; ++i)
        la_max = std::max(la_max, ta.ln_psi(ja, i) - ljr[i]);
      for (std::size_t j = 0; j < p; ++j)
        lb_max = std::max(lb_max, tb.ln_phi(jb, j) + ljc[j]);
      const double t_m = la_max + lb_max;
      const double c = 0.5 * (lb_max - la_max);
      for (std::size_t i = 0; i < n; ++i)
        P[i] = ta.sg(ja, i) * std::exp(ta.ln_psi(ja, i) - ljr[i] + c);
      for (std::size_t j = 0; j < p; ++j)
        Q[j] = tb.sg(jb, j) * std::exp(tb.ln_phi(jb, j) + ljc[j] - c);
      cblas_dger(CblasRowMajor, static_cast<int>(n), static_cast<int>(p), -1.0,
                 P.data(), 1, Q.data(), 1, B.data(), static_cast<int>(p));
      peak = std::max(peak, t_m);
      run = (t_m < peak - kTailDropNats) ? run + 1 : 0;
      if (m + 1 >= kTailMinTerms && run >= kTailRunLength) return B;
    }
    if (extra >= kTailCap)
      throw NonConvergence("kernel block tail expansion did not converge "
                           "within " + std::to_string(kTailCap) + " terms");
    extra = std::min(2 * extra, kTailCap);
  }
}

}  // namespace

std::vector<double> kernel_scaled_block(long u_row,
                                        const std::vector<double>& y_row,
                                        long u_col,
                                        const std::vector<double>& y_col) {
  require_lines(u_row, u_col);
  const std::size_t n = y_row.size(), p = y_col.size();
  std::vector<double> ljr(n), ljc(p);
  for (std::size_t i = 0; i < n; ++i) ljr[i] = ln_scale_factor_J(u_row, y_row[i]);
  for (std::size_t j = 0; j < p; ++j) ljc[j] = ln_scale_factor_J(u_col, y_col[j]);

  // Conjugated transition function; subtracted from the near form and used
  // afterwards to measure the realized cancellation entry by entry.
  std::vector<double> lphi;
  if (u_row < u_col) {
    lphi.assign(n * p, kNegInf);
    const double d = static_cast<double>(u_col - u_row);
    const double lg = std::lgamma(d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const double dy = y_col[j] - y_row[i];
        if (dy > 0.0)
          lphi[i * p + j] = (d - 1.0) * std::log(dy) - lg + ljc[j] - ljr[i];
      }
  }

  // Near form: sum over l = 1..u_col with per-term balanced prescale.
  const long terms = u_col;
  const LnPsiTable ta(y_row, static_cast<int>(u_row));
  const LnPsiTable tb(y_col, static_cast<int>(u_col));
  const long mneg = std::max<long>(0, terms - u_row);
  std::vector<std::vector<double>> lneg(n);
  if (mneg > 0)
    for (std::size_t i = 0; i < n; ++i)
      lneg[i] = psi_neg_log_table(y_row[i], static_cast<int>(mneg));

  std::vector<double> la(n * terms), sa(n * terms);
  for (std::size_t i = 0; i < n; ++i)
    for (long l = 1; l <= terms; ++l) {
      const long j = u_row - l;
      double lv, sv;
      if (j >= 0) {
        lv = ta.ln_psi(static_cast<int>(j), i);
        sv = ta.sg(static_cast<int>(j), i);
      } else {
        lv = lneg[i][static_cast<std::size_t>(-j) - 1];
        sv = 1.0;
      }
      la[i * terms + (l - 1)] = lv - ljr[i];
      sa[i * terms + (l - 1)] = sv;
    }

  std::vector<double> lb(terms * p), sb(terms * p);
  for (long l = 1; l <= terms; ++l) {
    const int j = static_cast<int>(u_col - l);
    for (std::size_t jj = 0; jj < p; ++jj) {
      lb[(l - 1) * p + jj] = tb.ln_phi(j, jj) + ljc[jj];
      sb[(l - 1) * p + jj] = tb.sg(j, jj);
    }
  }

  std::vector<double> c(terms);
  for (long l = 0; l < terms; ++l) {
    double la_max = kNegInf, lb_max = kNegInf;
    for (std::size_t i = 0; i < n; ++i)
      la_max = std::max(la_max, la[i * terms + l]);
    for (std::size_t jj = 0; jj < p; ++jj)
      lb_max = std::max(lb_max, lb[l * p + jj]);
    c[l] = 0.5 * (lb_max - la_max);
  }

  std::vector<double> P(n * terms), Q(terms * p);
  for (std::size_t i = 0; i < n; ++i)
    for (long l = 0; l < terms; ++l)
      P[i * terms + l] = sa[i * terms + l] * std::exp(la[i * terms + l] + c[l]);
  for (long l = 0; l < terms; ++l)
    for (std::size_t jj = 0; jj < p; ++jj)
      Q[l * p + jj] = sb[l * p + jj] * std::exp(lb[l * p + jj] - c[l]);

  std::vector<double> B(n * p, 0.0);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(n),
              static_cast<int>(p), static_cast<int>(terms), 1.0, P.data(),
              static_cast<int>(terms), Q.data(), static_cast<int>(p), 0.0,
              B.data(), static_cast<int>(p));

  if (u_row < u_col) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j)
        if (lphi[i * p + j] != kNegInf) B[i * p + j] -= std::exp(lphi[i * p + j]);

    // Per-entry peak of the near computation: the max-plus product of la and
    // lb (both already conjugated).  An entry whose noise floor - peak times
    // the scale-dependent component error - rises above 1e-11 * max(1, |B|)
    // has been cancelled away and is recomputed from the tail expansion,
    // which sidesteps the transition function entirely.
    std::vector<double> maxpl(n * p, kNegInf);
    for (std::size_t i = 0; i < n; ++i)
      for (long l = 0; l < terms; ++l) {
        const double v = la[i * terms + l];
        if (v == kNegInf) continue;
        double* mrow = maxpl.data() + i * p;
        const double* lrow = lb.data() + static_cast<std::size_t>(l) * p;
        for (std::size_t j = 0; j < p; ++j)
          mrow[j] = std::max(mrow[j], v + lrow[j]);
      }
    bool any_lost = false;
    std::vector<char> lost(n * p, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const std::size_t ij = i * p + j;
        const double ref = std::max(maxpl[ij], lphi[ij]);
        if (ref == kNegInf) continue;
        const double comp =
            kEps * (2.0 + std::fabs(ref) + std::fabs(ljr[i]) + std::fabs(ljc[j]));
        const double noise = ref + std::log(comp);
        const double ab = std::fabs(B[ij]);
        const double sig = (ab == 0.0) ? 0.0 : std::max(0.0, std::log(ab));
        if (noise > kLnEntryTol + sig) {
          lost[ij] = 1;
          any_lost = true;
        }
      }
    if (any_lost) {
      const std::vector<double> T =
          block_tail_form(u_row, y_row, ljr, u_col, y_col, ljc);
      for (std::size_t ij = 0; ij < n * p; ++ij)
        if (lost[ij]) B[ij] = T[ij];
    }
  }
  return B;
}

std::vector<double> kernel_same_line_block(long u, const std::vector<double>& y) {
  require_lines(u, u);
  const std::size_t n = y.size();
  const std::vector<double> G = psihat_values(y, static_cast<int>(u));
  std::vector<double> S(n * n, 0.0);
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(n),
              static_cast<int>(n), static_cast<int>(u), 1.0, G.data(),
              static_cast<int>(n), G.data(), static_cast<int>(n), 0.0, S.data(),
              static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (S[i * n + j] + S[j * n + i]);
      S[i * n + j] = s;
      S[j * n + i] = s;
    }
  return S;
}

}  // namespace minors
