/* ---------------------------------------------------------------------------
 * fredholm.cpp -- Nystrom determinants for gap probabilities.
 *
 * Discretization: Gauss-Legendre nodes on [t, t+L] in scaled coordinates;
 * the change of measure dy = dytilde / (sqrt(2) u^{1/6}) joins the weights.
 * Single-line and Airy restrictions are Gram matrices (symmetric PSD), so
 * det(I - A) = exp(sum log1p(-lambda_i)) with lambda from a symmetric
 * eigensolve -- this keeps log-determinants accurate even when the
 * determinant is within 1e-15 of 1 (deep right tail), and the survival
 * probability -expm1(logdet) stays exact down to ~1e-300.
 *
 * The two-line probability is the determinant of the 2n x 2n block matrix
 *
 *     I - [ Da Sa Da     Da Kab Db ]
 *         [ Db Kba Da    Db Sb Db  ]
 *
 * computed by pivoted LU.  The diagonal blocks are the plain orthonormal
 * Gram matrices while the cross blocks carry the J conjugation; the mixed
 * normalization is a diagonal similarity of the uniformly conjugated matrix
 * (conjugating point weight Xi(u,y) = J(u,y) e^{y^2/2}), so the determinant
 * is unchanged.  Setting the lower cross block to zero gives the
 * decorrelated comparison operator, whose determinant factorizes exactly
 * into the product of the marginals.
 * ------------------------------------------------------------------------- */
#include "minors/fredholm.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <lapacke.h>
#include <vector>

#include "minors/minor_kernel.hpp"
#include "minors/special_functions.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace minors {

namespace {

void ensure_single_threaded_blas() {
  static const bool once = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}

void require_line(long u) {
  if (u < 1 || u > kMaxCertifiedLine)
    throw std::domain_error("line index must lie in [1, " +
                            std::to_string(kMaxCertifiedLine) + "]");
}

void require_threshold(double t) {
  if (!(t >= -10.0))
    throw std::domain_error("threshold must be >= -10 (scaled coordinates)");
}

double grid_length(double t, const FredholmOptions& opt) {
  return opt.length > 0.0 ? opt.length : default_truncation_length(t);
}

int refined_order(int order) {
  return std::min(512, static_cast<int>(std::ceil(1.5 * order)));
}

struct LineDiscretization {
  std::vector<double> y;  // unscaled ordinates
  std::vector<double> d;  // sqrt of quadrature measure (incl. Jacobian)
};

LineDiscretization discretize_line(long u, double t, double length,
                                   int order) {
  const QuadratureGrid g = build_grid(t, length, order);
  const double jac =
      1.4142135623730950488 * std::pow(static_cast<double>(u), 1.0 / 6.0);
  LineDiscretization ld;
  ld.y.resize(g.nodes.size());
  ld.d.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    ld.y[i] = from_scaled(ScaledPoint{u, g.nodes[i]}).y;
    ld.d[i] = std::sqrt(g.weights[i] / jac);
  }
  return ld;
}

// log det(I - A) for symmetric PSD A (eigenvalues clipped just below 1).
double logdet_psd(std::vector<double>& A, int n) {
  std::vector<double> lam(n);
  const int info =
      LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', n, A.data(), n, lam.data());
  if (info != 0)
    throw std::runtime_error("dsyevd failed, info = " + std::to_string(info));
  double logdet = 0.0;
  for (int i = 0; i < n; ++i)
    logdet += std::log1p(-std::min(lam[i], 1.0 - 1e-16));
  return logdet;
}

SingleLineResult result_from_logdet(double logdet) {
  SingleLineResult r;
  r.log_det = logdet;
  r.cdf = std::exp(logdet);
  r.survival = -std::expm1(logdet);
  return r;
}

SingleLineResult single_line_at(long u, double t, double length, int order) {
  const LineDiscretization ld = discretize_line(u, t, length, order);
  std::vector<double> A = kernel_same_line_block(u, ld.y);
  const std::size_t n = ld.y.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i * n + j] *= ld.d[i] * ld.d[j];
  return result_from_logdet(logdet_psd(A, static_cast<int>(n)));
}

double joint_at(long ua, double ta, long ub, double tb, double la, double lb,
                int order, bool decorrelate) {
  const LineDiscretization da = discretize_line(ua, ta, la, order);
  const LineDiscretization db = discretize_line(ub, tb, lb, order);
  const std::size_t n = da.y.size();
  const std::vector<double> Sa = kernel_same_line_block(ua, da.y);
  const std::vector<double> Sb = kernel_same_line_block(ub, db.y);
  const std::vector<double> Kab = kernel_scaled_block(ua, da.y, ub, db.y);
  std::vector<double> Kba;
  if (!decorrelate) Kba = kernel_scaled_block(ub, db.y, ua, da.y);

  const std::size_t n2 = 2 * n;
  std::vector<double> M(n2 * n2, 0.0);
  for (std::size_t i = 0; i < n2; ++i) M[i * n2 + i] = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      M[i * n2 + j] -= da.d[i] * Sa[i * n + j] * da.d[j];
      M[(n + i) * n2 + (n + j)] -= db.d[i] * Sb[i * n + j] * db.d[j];
      M[i * n2 + (n + j)] = -(da.d[i] * Kab[i * n + j] * db.d[j]);
      if (!decorrelate)
        M[(n + i) * n2 + j] = -(db.d[i] * Kba[i * n + j] * da.d[j]);
    }

  std::vector<lapack_int> ipiv(n2);
  const int info =
      LAPACKE_dgetrf(LAPACK_ROW_MAJOR, static_cast<lapack_int>(n2),
                     static_cast<lapack_int>(n2), M.data(),
                     static_cast<lapack_int>(n2), ipiv.data());
  if (info < 0)
    throw std::runtime_error("dgetrf failed, info = " + std::to_string(info));
  if (info > 0) return 0.0;  // exactly singular: determinant zero
  double logdet = 0.0;
  double sign = 1.0;
  for (std::size_t i = 0; i < n2; ++i) {
    const double piv = M[i * n2 + i];
    logdet += std::log(std::fabs(piv));
    if (piv < 0.0) sign = -sign;
    if (ipiv[i] != static_cast<lapack_int>(i) + 1) sign = -sign;
  }
  return sign * std::exp(logdet);
}

}  // namespace

/* --- single line ----------------------------------------------------------- */

SingleLineResult single_line(long u, double t, const FredholmOptions& opt) {
  ensure_single_threaded_blas();
  require_line(u);
  require_threshold(t);
  const double L = grid_length(t, opt);
  SingleLineResult r = single_line_at(u, t, L, opt.order);
  if (opt.check_convergence) {
    const SingleLineResult r2 = single_line_at(u, t, L, refined_order(opt.order));
    if (std::fabs(r.cdf - r2.cdf) > opt.convergence_tol)
      throw NonConvergence("single-line determinant: order " +
                           std::to_string(opt.order) + " and " +
                           std::to_string(refined_order(opt.order)) +
                           " disagree beyond tolerance");
    r = r2;
  }
  return r;
}

double single_line_cdf(long u, double t, const FredholmOptions& opt) {
  return single_line(u, t, opt).cdf;
}

/* --- two lines ------------------------------------------------------------- */

double joint_cdf(long u1, double t1, long u2, double t2,
                 const FredholmOptions& opt, bool decorrelate) {
  ensure_single_threaded_blas();
  require_line(u1);
  require_line(u2);
  require_threshold(t1);
  require_threshold(t2);
  if (u1 == u2) return single_line_cdf(u1, std::min(t1, t2), opt);

  // normalize so line a is the smaller minor
  long ua = u1, ub = u2;
  double ta = t1, tb = t2;
  if (ua > ub) {
    std::swap(ua, ub);
    std::swap(ta, tb);
  }
  const double la = grid_length(ta, opt);
  const double lb = grid_length(tb, opt);
  double v = joint_at(ua, ta, ub, tb, la, lb, opt.order, decorrelate);
  if (opt.check_convergence) {
    const double v2 =
        joint_at(ua, ta, ub, tb, la, lb, refined_order(opt.order), decorrelate);
    if (std::fabs(v - v2) > opt.convergence_tol)
      throw NonConvergence("two-line determinant: refinement disagreement");
    v = v2;
  }
  return v;
}

DecorrelationResult decorrelation_E(long u1, double t1, long u2, double t2,
                                    const FredholmOptions& opt) {
  DecorrelationResult r;
  r.joint = joint_cdf(u1, t1, u2, t2, opt);
  r.marginal1 = single_line_cdf(u1, t1, opt);
  r.marginal2 = single_line_cdf(u2, t2, opt);
  r.E_cdf_form = std::fabs(r.joint - r.marginal1 * r.marginal2);
  // Same quantity assembled from survival probabilities:
  //   Pr[both exceed] - S1 S2 = (1 - m1 - m2 + joint) - (1 - m1)(1 - m2).
  const double both_exceed = 1.0 - r.marginal1 - r.marginal2 + r.joint;
  const double s1s2 = (1.0 - r.marginal1) * (1.0 - r.marginal2);
  r.E_survival_form = std::fabs(both_exceed - s1s2);
  return r;
}

double correlation_F(long u1, double t1, long u2, double t2,
                     const FredholmOptions& opt) {
  if (u1 >= u2)
    throw std::domain_error("correlation_F: requires u1 < u2");
  const double c2 = single_line_cdf(u2, t2, opt);
  const double joint = joint_cdf(u1, t1, u2, t2, opt);
  return c2 - joint;
}

/* --- Tracy-Widom ------------------------------------------------------------ */

namespace {

TracyWidomResult tracy_widom_at(double s, double length, int order) {
  const QuadratureGrid g = build_grid(s, length, order);
  // inner w-integral nodes for the Airy Gram factorization
  static thread_local std::vector<double> gl24x, gl24w;
  if (gl24x.empty()) gauss_legendre(24, gl24x, gl24w);
  const double W = 14.0 + std::max(0.0, -s);
  const int npan = static_cast<int>(std::ceil(W / 2.0));
  const double h = W / npan;
  std::vector<double> wq, vq;  // nodes and weights of the inner rule
  for (int p = 0; p < npan; ++p) {
    const double c = (p + 0.5) * h;
    for (std::size_t q = 0; q < gl24x.size(); ++q) {
      wq.push_back(c + 0.5 * h * gl24x[q]);
      vq.push_back(0.5 * h * gl24w[q]);
    }
  }
  const std::size_t n = g.nodes.size(), m = wq.size();
  std::vector<double> T(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < m; ++q)
      T[i * m + q] = airy_ai(g.nodes[i] + wq[q]) * std::sqrt(vq[q]);
  // A_ij = d_i (T T^t)_ij d_j
  std::vector<double> A(n * n, 0.0);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(n),
              static_cast<int>(n), static_cast<int>(m), 1.0, T.data(),
              static_cast<int>(m), T.data(), static_cast<int>(m), 0.0, A.data(),
              static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A[i * n + j] *= std::sqrt(g.weights[i]) * std::sqrt(g.weights[j]);
  const double logdet = logdet_psd(A, static_cast<int>(n));
  TracyWidomResult r;
  r.log_det = logdet;
  r.cdf = std::exp(logdet);
  r.survival = -std::expm1(logdet);
  return r;
}

}  // namespace

TracyWidomResult tracy_widom(double s, const FredholmOptions& opt) {
  ensure_single_threaded_blas();
  if (!(s >= -8.0 && s <= 10.0))
    throw std::domain_error("tracy_widom: s must lie in [-8, 10]");
  const double L = grid_length(s, opt);
  TracyWidomResult r = tracy_widom_at(s, L, opt.order);
  if (opt.check_convergence) {
    const TracyWidomResult r2 = tracy_widom_at(s, L, refined_order(opt.order));
    if (std::fabs(r.cdf - r2.cdf) > opt.convergence_tol)
      throw NonConvergence("Tracy-Widom determinant: refinement disagreement");
    r = r2;
  }
  return r;
}

double tracy_widom_cdf(double s, const FredholmOptions& opt) {
  return tracy_widom(s, opt).cdf;
}

/* --- trace sandwich ---------------------------------------------------------- */

std::pair<double, double> trace_bounds(long u, double t,
                                       const FredholmOptions& opt) {
  ensure_single_threaded_blas();
  require_line(u);
  if (!(t >= 0.0))
    throw std::domain_error("trace_bounds: threshold must be >= 0 (right tail)");
  const double L = grid_length(t, opt);
  const LineDiscretization ld = discretize_line(u, t, L, opt.order);
  const std::size_t n = ld.y.size();
  const std::vector<double> G =
      psihat_values(ld.y, static_cast<int>(u));  // layout [j*n + i]
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (long j = 0; j < u; ++j) {
      const double v = G[static_cast<std::size_t>(j) * n + i];
      diag += v * v;
    }
    tr += ld.d[i] * ld.d[i] * diag;
  }
  return {-std::expm1(-tr), tr};
}

}  // namespace minors
