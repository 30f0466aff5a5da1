/* ---------------------------------------------------------------------------
 * dd.hpp -- minimal double-double arithmetic (~31 significant digits).
 *
 * Classic error-free transformations (Dekker/Knuth two-sum, FMA two-prod).
 * Used where a plain double loses too many digits to cancellation: the Airy
 * Maclaurin series up to |x| = 8.5, and the extended-precision oracles in the
 * test suite (direct Hermite sums, Christoffel-Darboux forms).
 * ------------------------------------------------------------------------- */
#pragma once

#include <cmath>

namespace minors {

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
};

namespace detail {

// exact: a + b = s + err, |a| >= |b| not required
inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return dd{s, err};
}

// exact: a * b = p + err (requires hardware FMA for the error term)
inline dd two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return dd{p, err};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  double s = a + b;
  double err = b - (s - a);
  return dd{s, err};
}

}  // namespace detail

inline dd operator+(const dd& a, const dd& b) {
  dd s = detail::two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return detail::quick_two_sum(s.hi, lo);
}

inline dd operator-(const dd& a, const dd& b) {
  return a + dd{-b.hi, -b.lo};
}

inline dd operator*(const dd& a, const dd& b) {
  dd p = detail::two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, lo);
}

inline dd operator*(const dd& a, double b) { return a * dd{b}; }
inline dd operator*(double a, const dd& b) { return dd{a} * b; }

inline dd operator/(const dd& a, const dd& b) {
  double q1 = a.hi / b.hi;
  dd r = a - b * q1;
  double q2 = r.hi / b.hi;
  r = r - b * q2;
  double q3 = r.hi / b.hi;
  dd q = detail::quick_two_sum(q1, q2);
  return q + dd{q3};
}

inline dd operator/(const dd& a, double b) { return a / dd{b}; }

inline bool abs_less(const dd& a, const dd& b) {
  return std::fabs(a.to_double()) < std::fabs(b.to_double());
}

}  // namespace minors
