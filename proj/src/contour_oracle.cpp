/* ---------------------------------------------------------------------------
 * contour_oracle.cpp -- steepest-descent double-contour kernel evaluation.
 *
 * Independent route to K(u1,y1;u2,y2) for u1 >= u2: the kernel is a double
 * contour integral of
 *
 *     (1/(2 pi i)^2)  e^{u1 G(u1,z1,y1) - u2 G(u2,z2,y2)} / (z1 - z2)
 *
 * where, after recentering at the saddle z = sqrt(u/2) and rescaling
 * z = (zt + u^{1/3}) u^{1/6} / sqrt(2), the exponent becomes
 *
 *     u G = u (Log(1+w) - w + w^2/2) - zt * yt,     w = zt u^{-1/3},
 *
 * with yt the edge-scaled ordinate.  Near w = 0 the Log expression is
 * evaluated by its Taylor tail sum_{k>=3} (-1)^{k+1} w^k / k to avoid
 * cancellation.  The ascending contour for z1 leaves the real axis at a
 * small shift s0 >= 0 along e^{i pi/3} and continues vertically; the z2
 * contour leaves 0 along e^{2 i pi/3} and continues horizontally left.
 * Lower halves are the complex-conjugate reflections (nodes conj(z),
 * weights -conj(w)).  Everything is shared-exponent prescaled by the
 * extreme real parts C1, C2 so the quadrature sums stay order one.
 *
 * Used only as a cross-validation oracle for kernel_raw: two panel
 * refinements must agree to rel_tol or NonConvergence is thrown.
 * ------------------------------------------------------------------------- */
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "minors/fredholm.hpp"  // NonConvergence
#include "minors/minor_kernel.hpp"
#include "minors/quadrature.hpp"

namespace minors {

namespace {

using cplx = std::complex<double>;

struct Contour {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
};

// Gauss-Legendre panels along the straight segment [z0, z1].
void add_segment(Contour& c, cplx z0, cplx z1, double panel_len, int order,
                 const std::vector<double>& gx, const std::vector<double>& gw) {
  const double seg = std::abs(z1 - z0);
  const int npan = std::max(2, static_cast<int>(std::ceil(seg / panel_len)));
  for (int p = 0; p < npan; ++p) {
    const cplx a = z0 + (z1 - z0) * (static_cast<double>(p) / npan);
    const cplx b = z0 + (z1 - z0) * (static_cast<double>(p + 1) / npan);
    const cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < order; ++q) {
      c.nodes.push_back(mid + half * gx[q]);
      c.weights.push_back(half * gw[q]);
    }
  }
}

// Append the conjugate-reflected lower half: nodes conj(z), weights -conj(w).
Contour close_under_conjugation(const Contour& upper) {
  Contour full;
  const std::size_t n = upper.nodes.size();
  full.nodes.reserve(2 * n);
  full.weights.reserve(2 * n);
  for (std::size_t i = n; i-- > 0;) {
    full.nodes.push_back(std::conj(upper.nodes[i]));
    full.weights.push_back(-std::conj(upper.weights[i]));
  }
  full.nodes.insert(full.nodes.end(), upper.nodes.begin(), upper.nodes.end());
  full.weights.insert(full.weights.end(), upper.weights.begin(),
                      upper.weights.end());
  return full;
}

// u G(zt) = u (Log(1+w) - w + w^2/2) - zt yt with the small-|w| Taylor tail.
cplx exponent_uG(double u, cplx zt, double yt) {
  const cplx w = zt * std::pow(u, -1.0 / 3.0);
  cplx val;
  if (std::abs(w) <= 0.25) {
    cplx s = 0.0, p = w * w * w;
    for (int k = 3; k < 40; ++k) {
      s += ((k % 2) ? p : -p) / static_cast<double>(k);  // (-1)^{k+1} w^k / k
      p *= w;
    }
    val = u * s;
  } else {
    val = u * (std::log(1.0 + w) - w + 0.5 * w * w);
  }
  return val - zt * yt;
}

struct OracleEval {
  cplx mantissa;  // order-one complex value
  double ln_mag;  // shared log magnitude
};

OracleEval evaluate(long u1, double y1, long u2, double y2, double panel_len,
                    int order) {
  const double r1 = std::pow(static_cast<double>(u1), 1.0 / 6.0);
  const double r2 = std::pow(static_cast<double>(u2), 1.0 / 6.0);
  const double cbrt1 = r1 * r1;  // u1^{1/3}
  const double cbrt2 = r2 * r2;
  const double sqrt2 = 1.4142135623730950488;
  const double yt1 = sqrt2 * r1 * y1 - 2.0 * cbrt1 * cbrt1;
  const double yt2 = sqrt2 * r2 * y2 - 2.0 * cbrt2 * cbrt2;

  // When the two saddles sqrt(u/2) coincide (u1 ~ u2) the z1 contour vertex
  // must step off the z2 contour vertex; the shift shrinks as the saddle
  // separation (in zt1 units) grows.
  const double gap = (std::sqrt(0.5 * u1) - std::sqrt(0.5 * u2)) * sqrt2 / r1;
  const double s0 = std::max(0.0, 0.75 - gap);

  const double ray = 8.0 + 2.0 * std::sqrt(std::max(0.0, -std::min(yt1, yt2)));

  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);

  Contour up1;
  const cplx e60{0.5, 0.86602540378443864676};  // e^{i pi/3}
  const cplx vertex1 = cplx{s0, 0.0} + (0.5 * cbrt1) * e60;
  add_segment(up1, cplx{s0, 0.0}, vertex1, panel_len, order, gx, gw);
  add_segment(up1, vertex1, vertex1 + cplx{0.0, ray}, panel_len, order, gx, gw);
  const Contour g1 = close_under_conjugation(up1);

  Contour up2;
  const cplx e120{-0.5, 0.86602540378443864676};  // e^{2 i pi/3}
  const cplx vertex2 = (2.0 * cbrt2) * e120;
  add_segment(up2, cplx{0.0, 0.0}, vertex2, panel_len, order, gx, gw);
  add_segment(up2, vertex2, vertex2 - cplx{2.0 * ray, 0.0}, panel_len, order,
              gx, gw);
  const Contour g2 = close_under_conjugation(up2);

  const std::size_t n1 = g1.nodes.size(), n2 = g2.nodes.size();
  std::vector<cplx> A(n1), B(n2), z1v(n1), z2v(n2);
  double C1 = -std::numeric_limits<double>::infinity();
  double C2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n1; ++i) {
    A[i] = exponent_uG(static_cast<double>(u1), g1.nodes[i], yt1);
    z1v[i] = (g1.nodes[i] + cbrt1) * r1 / sqrt2;
    C1 = std::max(C1, A[i].real());
  }
  for (std::size_t j = 0; j < n2; ++j) {
    B[j] = exponent_uG(static_cast<double>(u2), g2.nodes[j], yt2);
    z2v[j] = (g2.nodes[j] + cbrt2) * r2 / sqrt2;
    C2 = std::min(C2, B[j].real());
  }

  std::vector<cplx> E1(n1), E2(n2);
  for (std::size_t i = 0; i < n1; ++i)
    E1[i] = g1.weights[i] * std::exp(A[i] - C1);
  for (std::size_t j = 0; j < n2; ++j)
    E2[j] = g2.weights[j] * std::exp(-(B[j] - C2));

  cplx S = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    cplx row = 0.0;
    for (std::size_t j = 0; j < n2; ++j) row += E2[j] / (z1v[i] - z2v[j]);
    S += E1[i] * row;
  }

  const double pref = r1 * r2 / 2.0;  // u1^{1/6} u2^{1/6} / 2
  // the conjugation-closed contours carry 1 / (2 (pi i)^2) = -1 / (2 pi^2)
  const cplx val = S * pref * (-1.0 / (2.0 * 9.8696044010893586188));  // pi^2
  const double ln_mag = C1 - C2 + ln_scale_factor_J(u1, y1) -
                        ln_scale_factor_J(u2, y2);
  return OracleEval{val, ln_mag};
}

}  // namespace

LogScaledValue kernel_contour_oracle(long u1, double y1, long u2, double y2,
                                     const ContourOptions& opt) {
  if (u1 < u2)
    throw std::domain_error("kernel_contour_oracle: requires u1 >= u2 (the "
                            "transition-function term is absent there)");
  if (u2 < 1 || u1 > 512)
    throw std::domain_error("kernel_contour_oracle: lines must satisfy "
                            "1 <= u2 <= u1 <= 512");

  const OracleEval coarse =
      evaluate(u1, y1, u2, y2, opt.panel_len, opt.panel_order);
  const OracleEval fine =
      evaluate(u1, y1, u2, y2, 0.5 * opt.panel_len, opt.panel_order);

  // Compare at shared exponent.
  const cplx vc = coarse.mantissa * std::exp(coarse.ln_mag - fine.ln_mag);
  const cplx d = vc - fine.mantissa;
  const double denom = std::abs(fine.mantissa);
  if (!(denom > 0.0) || std::abs(d) > opt.rel_tol * denom)
    throw NonConvergence("contour oracle refinements disagree beyond rel_tol");

  const double re = fine.mantissa.real();
  if (re == 0.0) return LogScaledValue::zero();
  return LogScaledValue::from_log(re > 0 ? +1 : -1,
                                  std::log(std::fabs(re)) + fine.ln_mag);
}

}  // namespace minors
