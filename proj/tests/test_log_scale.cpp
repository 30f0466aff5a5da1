/* ---------------------------------------------------------------------------
 * test_log_scale.cpp -- sign/log-magnitude arithmetic.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <limits>

#include "doctest.h"
#include "minors/log_scale.hpp"
#include "test_support.hpp"

using minors::LogScaledValue;

TEST_SUITE("log_scale") {

TEST_CASE("encode/decode round-trips representable doubles") {
  for (double v : {3.0, -7.25, 1e-300, -1e300, 0.4375, -2.2250738585072014e-308}) {
    const LogScaledValue a = LogScaledValue::encode(v);
    // the trip through log/exp costs up to |log v| ulps, ~1.5e-13 at 1e300
    CHECK(a.decode() == doctest::Approx(v).epsilon(1e-12));
    CHECK(a.is_zero() == false);
    CHECK(a.sign == (v < 0 ? -1 : +1));
  }
  CHECK(LogScaledValue::encode(0.0).is_zero());
  CHECK(LogScaledValue::encode(std::nan("")).is_zero());
  CHECK(LogScaledValue::zero().decode() == 0.0);
}

TEST_CASE("from_log represents magnitudes far outside double range") {
  const LogScaledValue deep = LogScaledValue::from_log(1, -5000.0);
  CHECK(!deep.is_zero());
  CHECK(deep.log_magnitude == -5000.0);
  CHECK(deep.decode() == 0.0);  // underflows only on decode
  CHECK(LogScaledValue::from_log(0, 3.0).is_zero());
  CHECK(LogScaledValue::from_log(-5, 2.0).sign == -1);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  CHECK(LogScaledValue::from_log(1, neg_inf).is_zero());
}

TEST_CASE("multiplication and division act on logs") {
  const LogScaledValue a = LogScaledValue::encode(3.0);
  const LogScaledValue b = LogScaledValue::encode(-7.0);
  CHECK((a * b).decode() == doctest::Approx(-21.0).epsilon(1e-15));
  CHECK((b / a).decode() == doctest::Approx(-7.0 / 3.0).epsilon(1e-15));
  // products of deep values stay finite in log space
  const LogScaledValue deep = LogScaledValue::from_log(-1, -4000.0);
  const LogScaledValue prod = deep * deep;
  CHECK(prod.sign == 1);
  CHECK(prod.log_magnitude == doctest::Approx(-8000.0));
  CHECK((a * LogScaledValue::zero()).is_zero());
}

TEST_CASE("signed addition matches double arithmetic when representable") {
  testsup::TestRng rng(20260815u);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(-50.0, 50.0);
    const double y = rng.uniform(-50.0, 50.0);
    const double direct = x + y;
    const LogScaledValue s =
        LogScaledValue::encode(x) + LogScaledValue::encode(y);
    if (direct == 0.0) {
      CHECK(s.is_zero());
    } else {
      CHECK(testsup::rel_diff(s.decode(), direct) < 1e-13);
    }
  }
}

TEST_CASE("exactly cancelling magnitudes give the canonical zero") {
  const LogScaledValue a = LogScaledValue::from_log(1, -1234.5);
  const LogScaledValue s = a + (-a);
  CHECK(s.is_zero());
  CHECK(s.sign == 0);
  CHECK((a - a).is_zero());
}

TEST_CASE("addition at deep scale keeps relative structure") {
  const LogScaledValue a = LogScaledValue::from_log(1, -1000.0);
  const LogScaledValue two_a = a + a;
  CHECK(two_a.sign == 1);
  CHECK(two_a.log_magnitude ==
        doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  // opposite signs, 1 nat apart: e^{-1000}(e - 1)/e relative to the larger
  const LogScaledValue b = LogScaledValue::from_log(-1, -1001.0);
  const LogScaledValue d = a + b;
  CHECK(d.sign == 1);
  CHECK(d.log_magnitude ==
        doctest::Approx(-1000.0 + std::log1p(-std::exp(-1.0))).epsilon(1e-15));
}

TEST_CASE("sign of a sum follows the larger magnitude") {
  const LogScaledValue small = LogScaledValue::encode(2.0);
  const LogScaledValue large = LogScaledValue::encode(-5.0);
  CHECK((small + large).sign == -1);
  CHECK((small + large).decode() == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK((-large).sign == 1);
  CHECK((-LogScaledValue::zero()).is_zero());
}

}  // TEST_SUITE
