/* ---------------------------------------------------------------------------
 * log_scale.hpp -- sign/log-magnitude representation of real numbers.
 *
 * Quantities such as the Hermite normalizers N_j = 2^j j! sqrt(pi) and the
 * weighted polynomials e^{-x^2} H_j(x) span thousands of orders of magnitude
 * for j up to ~10^4.  All internal kernel arithmetic therefore carries
 * (sign, log|value|) pairs; plain doubles are decoded only when the final
 * quantity is known to be representable.
 * ------------------------------------------------------------------------- */
#pragma once

#include <cmath>
#include <limits>

namespace minors {

struct LogScaledValue {
  int sign = 0;  // -1, 0, +1
  double log_magnitude = -std::numeric_limits<double>::infinity();

  static LogScaledValue zero() { return LogScaledValue{}; }

  static LogScaledValue from_log(int s, double lm) {
    if (s == 0 || lm == -std::numeric_limits<double>::infinity())
      return LogScaledValue{};
    return LogScaledValue{s < 0 ? -1 : +1, lm};
  }

  static LogScaledValue encode(double v) {
    if (v == 0.0 || std::isnan(v)) return LogScaledValue{};
    return LogScaledValue{v < 0.0 ? -1 : +1, std::log(std::fabs(v))};
  }

  double decode() const {
    if (sign == 0) return 0.0;
    return static_cast<double>(sign) * std::exp(log_magnitude);
  }

  bool is_zero() const { return sign == 0; }

  LogScaledValue operator-() const {
    return LogScaledValue{-sign, log_magnitude};
  }

  friend LogScaledValue operator*(const LogScaledValue& a,
                                  const LogScaledValue& b) {
    if (a.sign == 0 || b.sign == 0) return LogScaledValue{};
    return LogScaledValue{a.sign * b.sign, a.log_magnitude + b.log_magnitude};
  }

  friend LogScaledValue operator/(const LogScaledValue& a,
                                  const LogScaledValue& b) {
    // division by zero is a caller bug; propagate NaN log to make it loud
    if (a.sign == 0) return LogScaledValue{};
    return LogScaledValue{a.sign * b.sign, a.log_magnitude - b.log_magnitude};
  }

  // Signed addition through log space.  Exact cancellation of equal
  // magnitudes returns the canonical zero.
  friend LogScaledValue operator+(const LogScaledValue& a,
                                  const LogScaledValue& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogScaledValue& hi = (a.log_magnitude >= b.log_magnitude) ? a : b;
    const LogScaledValue& lo = (a.log_magnitude >= b.log_magnitude) ? b : a;
    const double d = lo.log_magnitude - hi.log_magnitude;  // <= 0
    if (hi.sign == lo.sign)
      return LogScaledValue{hi.sign, hi.log_magnitude + std::log1p(std::exp(d))};
    if (d == 0.0) return LogScaledValue{};
    return LogScaledValue{hi.sign, hi.log_magnitude + std::log1p(-std::exp(d))};
  }

  friend LogScaledValue operator-(const LogScaledValue& a,
                                  const LogScaledValue& b) {
    return a + (-b);
  }
};

}  // namespace minors
