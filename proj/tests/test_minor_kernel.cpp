/* ---------------------------------------------------------------------------
 * test_minor_kernel.cpp -- the coupled-line kernel, its scalings and blocks.
 *
 * Anchor values carry 20 digits and were frozen from 60-digit arithmetic
 * through two independent routes (Hermite summation and the contour
 * representation; for the deep-cancellation anchors additionally the exact
 * Gamma-function closed forms of the tail integrals).
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "minors/minor_kernel.hpp"
#include "minors/special_functions.hpp"
#include "test_support.hpp"

using minors::LinePoint;
using minors::LogScaledValue;
using minors::ScaledPoint;

TEST_SUITE("minor_kernel") {

TEST_CASE("edge scaling and its inverse") {
  for (long u : {1L, 7L, 512L}) {
    for (double y : {-2.0, 0.0, 0.37, 11.5}) {
      const ScaledPoint s = minors::to_scaled(LinePoint{u, y});
      const double uu = static_cast<double>(u);
      const double expect = std::sqrt(2.0) * std::pow(uu, 1.0 / 6.0) * y -
                            2.0 * std::pow(uu, 2.0 / 3.0);
      CHECK(s.y_tilde == doctest::Approx(expect).epsilon(1e-13));
      const LinePoint back = minors::from_scaled(s);
      CHECK(back.u == u);
      CHECK(back.y == doctest::Approx(y).epsilon(1e-13));
    }
  }
  // the scaled origin sits at the spectral edge sqrt(2u)
  const LinePoint edge = minors::from_scaled(ScaledPoint{128, 0.0});
  CHECK(edge.y == doctest::Approx(std::sqrt(256.0)).epsilon(1e-14));
}

TEST_CASE("conjugation factor J") {
  // J(2, 0) = 2^2 e^{1 (ln 1 + 1)} = 4 e
  CHECK(testsup::rel_diff(minors::scale_factor_J(2, 0.0).decode(),
                          10.873127313836180941) < 1e-13);
  CHECK(minors::ln_scale_factor_J(2, 0.0) ==
        doctest::Approx(std::log(10.873127313836180941)).epsilon(1e-14));
  // shift rule J(u, y + d) = J(u, y) e^{-sqrt(2u) d}
  for (long u : {5L, 300L}) {
    const double d = 0.7;
    const double lhs = minors::ln_scale_factor_J(u, 1.1 + d);
    const double rhs = minors::ln_scale_factor_J(u, 1.1) -
                       std::sqrt(2.0 * static_cast<double>(u)) * d;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("transition function indicator structure") {
  CHECK(minors::phi_transition(5, 0.0, 5, 3.0).is_zero());   // u1 >= u2
  CHECK(minors::phi_transition(7, 0.0, 3, 3.0).is_zero());   // u1 >= u2
  CHECK(minors::phi_transition(2, 1.0, 6, 0.5).is_zero());   // y2 <= y1
  CHECK(minors::phi_transition(2, 1.0, 6, 1.0).is_zero());   // y2 == y1
  // adjacent lines: (y2-y1)^0 / 0! = 1
  CHECK(minors::phi_transition(4, -0.3, 5, 2.1).decode() ==
        doctest::Approx(1.0).epsilon(1e-14));
  // gap 3: (y2-y1)^2 / 2!
  CHECK(minors::phi_transition(2, 0.25, 5, 1.75).decode() ==
        doctest::Approx(0.5 * 1.5 * 1.5).epsilon(1e-13));
  // wide gap stays finite in log space: gap 101, dy = 9
  const LogScaledValue wide = minors::phi_transition(1, 0.0, 102, 9.0);
  CHECK(wide.sign == 1);
  CHECK(wide.log_magnitude ==
        doctest::Approx(100.0 * std::log(9.0) - std::lgamma(101.0))
            .epsilon(1e-13));
}

TEST_CASE("single-line closed form at u = 1") {
  // K(1,y1;1,y2) = Psi_0(y1) Phi_0(y2) = e^{-y1^2} / sqrt(pi), free of y2
  CHECK(testsup::rel_diff(minors::kernel_raw(1, 0.7, 1, -0.3).decode(),
                          0.34563743020526928603) < 1e-13);
  const double inv_sqrt_pi = 0.56418958354775628695;
  for (double y1 : {-1.2, 0.0, 2.4}) {
    for (double y2 : {-5.0, 0.1, 3.0}) {
      CHECK(testsup::rel_diff(minors::kernel_raw(1, y1, 1, y2).decode(),
                              std::exp(-y1 * y1) * inv_sqrt_pi) < 1e-13);
    }
  }
}

TEST_CASE("kernel anchors across the phi indicator") {
  // u1 > u2: no transition term regardless of ordering
  CHECK(testsup::rel_diff(minors::kernel_raw(6, 0.4, 3, -0.2).decode(),
                          -6.7279460065627464497) < 1e-12);
  // u1 < u2 with y2 > y1: the transition term is active
  CHECK(testsup::rel_diff(minors::kernel_raw(2, 0.1, 5, 0.9).decode(),
                          -0.0031779938140672713762) < 1e-12);
  // u1 < u2 with y2 < y1: pure Hermite sum
  CHECK(testsup::rel_diff(minors::kernel_raw(2, 0.1, 5, -0.9).decode(),
                          0.009607311991920437527) < 1e-12);
  CHECK_THROWS_AS(minors::kernel_raw(0, 0.0, 3, 0.0), std::domain_error);
}

TEST_CASE("deep-separation anchors stay accurate through the regime switch") {
  struct Anchor {
    long u1;
    double y1;
    long u2;
    double y2;
    double ln_mag;
    int sign;
    double tol;
  };
  // the last anchor is adversarial by construction: the defining form
  // cancels 54 nats internally, the absolute-series form 23; ~1e-6 is the
  // honest limit of double arithmetic there
  const Anchor anchors[] = {
      {3, 2.5672489270832264, 48, 9.612499877235113, -43.41025817401831, -1,
       1e-11},
      {8, 4.0, 24, 7.05310570692385, -11.78198900627928, -1, 1e-12},
      {2, -3.0, 64, 2.39, -129.7744501352097, +1, 1e-11},
      {5, 0.0, 128, 4.0, -284.6338327316356929, +1, 3e-5},
  };
  for (const Anchor& a : anchors) {
    const LogScaledValue k = minors::kernel_raw(a.u1, a.y1, a.u2, a.y2);
    CHECK(k.sign == a.sign);
    CHECK(std::fabs(k.log_magnitude - a.ln_mag) < a.tol);
  }
}

TEST_CASE("phi-cancellation identity K + phi == bare sum") {
  // in the regime where the defining form is kept, the identity is exact up
  // to one log-space addition
  const struct {
    long u1;
    double y1;
    long u2;
    double y2;
  } pts[] = {{2, 0.1, 5, 0.9}, {3, -0.4, 9, 1.3}, {10, 4.2, 12, 4.9}};
  for (const auto& p : pts) {
    const LogScaledValue k = minors::kernel_raw(p.u1, p.y1, p.u2, p.y2);
    const LogScaledValue ph = minors::phi_transition(p.u1, p.y1, p.u2, p.y2);
    const LogScaledValue sum = minors::kernel_sum_part(p.u1, p.y1, p.u2, p.y2);
    const LogScaledValue lhs = k + ph;
    REQUIRE(!sum.is_zero());
    CHECK(lhs.sign == sum.sign);
    const double shift = sum.log_magnitude;
    CHECK(std::fabs(lhs.sign * std::exp(lhs.log_magnitude - shift) -
                    sum.sign * 1.0) < 5e-15);
  }
}

TEST_CASE("scaled kernel is the J-conjugated raw kernel") {
  testsup::TestRng rng(424243u);
  for (int trial = 0; trial < 12; ++trial) {
    const long u1 = rng.integer(1, 40);
    const long u2 = rng.integer(1, 40);
    const double yt1 = rng.uniform(-3.0, 1.5);
    const double yt2 = rng.uniform(-3.0, 1.5);
    const LinePoint p1 = minors::from_scaled(ScaledPoint{u1, yt1});
    const LinePoint p2 = minors::from_scaled(ScaledPoint{u2, yt2});
    const LogScaledValue k = minors::kernel_raw(u1, p1.y, u2, p2.y);
    const double jdiff = minors::ln_scale_factor_J(u2, p2.y) -
                         minors::ln_scale_factor_J(u1, p1.y);
    const double expect =
        k.is_zero() ? 0.0 : k.sign * std::exp(k.log_magnitude + jdiff);
    const double got = minors::kernel_scaled(u1, yt1, u2, yt2);
    CHECK(std::fabs(got - expect) < 1e-12 * std::max(1.0, std::fabs(expect)));
  }
}

TEST_CASE("scaled kernel anchors") {
  CHECK(testsup::rel_diff(minors::kernel_scaled(8, 0.35, 5, -0.15),
                          0.07779576108032512291) < 1e-12);
  // deep anchors in scaled form
  const ScaledPoint a1 = minors::to_scaled(LinePoint{3, 2.5672489270832264});
  const ScaledPoint a2 = minors::to_scaled(LinePoint{48, 9.612499877235113});
  CHECK(testsup::rel_diff(
            minors::kernel_scaled(3, a1.y_tilde, 48, a2.y_tilde),
            -0.1425631419887278) < 1e-10);
  const ScaledPoint b1 = minors::to_scaled(LinePoint{8, 4.0});
  const ScaledPoint b2 = minors::to_scaled(LinePoint{24, 7.05310570692385});
  CHECK(testsup::rel_diff(
            minors::kernel_scaled(8, b1.y_tilde, 24, b2.y_tilde),
            -0.2771264145930234) < 1e-11);
}

TEST_CASE("decorrelated kernel zeroes the downward direction only") {
  CHECK(minors::kernel_decorrelated(5, 0.2, 8, -0.4) ==
        minors::kernel_scaled(5, 0.2, 8, -0.4));
  CHECK(minors::kernel_decorrelated(8, -0.4, 5, 0.2) == 0.0);
  CHECK(minors::kernel_decorrelated(6, 0.1, 6, 0.8) ==
        minors::kernel_scaled(6, 0.1, 6, 0.8));
}

TEST_CASE("cross-line block agrees with pointwise evaluation") {
  // nearby lines, operator-style grids
  std::vector<double> yr, yc;
  for (double yt : {-2.0, -0.5, 0.8}) {
    yr.push_back(minors::from_scaled(ScaledPoint{5, yt}).y);
  }
  for (double yt : {-1.4, 0.2, 1.1, 2.5}) {
    yc.push_back(minors::from_scaled(ScaledPoint{8, yt}).y);
  }
  const std::vector<double> B = minors::kernel_scaled_block(5, yr, 8, yc);
  REQUIRE(B.size() == yr.size() * yc.size());
  for (std::size_t i = 0; i < yr.size(); ++i) {
    for (std::size_t j = 0; j < yc.size(); ++j) {
      const double want =
          minors::kernel_scaled(5, minors::to_scaled(LinePoint{5, yr[i]}).y_tilde,
                                8, minors::to_scaled(LinePoint{8, yc[j]}).y_tilde);
      CHECK(std::fabs(B[i * yc.size() + j] - want) <
            2e-13 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("cross-line block at wide separation (regime-switch entries)") {
  // lines 60 and 1024: entries hit the deep-cancellation fallback; both
  // routes are honest to the 1e-11 design floor, so compare with a mixed
  // absolute/relative tolerance rather than bitwise
  std::vector<double> yr, yc;
  for (double yt : {0.3, 1.7, 4.1, 9.0})
    yr.push_back(minors::from_scaled(ScaledPoint{60, yt}).y);
  for (double yt : {0.2, 1.1, 3.3, 7.7})
    yc.push_back(minors::from_scaled(ScaledPoint{1024, yt}).y);
  const std::vector<double> B = minors::kernel_scaled_block(60, yr, 1024, yc);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double want = minors::kernel_scaled(
          60, minors::to_scaled(LinePoint{60, yr[i]}).y_tilde, 1024,
          minors::to_scaled(LinePoint{1024, yc[j]}).y_tilde);
      CHECK(std::fabs(B[i * 4 + j] - want) <
            1e-8 * std::max(1.0, std::fabs(want)));
    }
  }
  // reverse direction has no transition term at all
  const std::vector<double> R = minors::kernel_scaled_block(1024, yc, 60, yr);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double want = minors::kernel_scaled(
          1024, minors::to_scaled(LinePoint{1024, yc[i]}).y_tilde, 60,
          minors::to_scaled(LinePoint{60, yr[j]}).y_tilde);
      CHECK(std::fabs(R[i * 4 + j] - want) <
            1e-10 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("same-line Gram block equals the Christoffel-Darboux kernel") {
  for (long N : {5L, 20L, 100L}) {
    const double edge = std::sqrt(2.0 * static_cast<double>(N));
    const std::vector<double> y = {edge - 1.5, edge - 0.3, edge + 0.4};
    const std::vector<double> B = minors::kernel_same_line_block(N, y);
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double ref = testsup::cd_kernel_dd(N, y[i], y[j]);
        CHECK(testsup::rel_diff(B[i * n + j], ref) < 1e-9);
        CHECK(B[i * n + j] == B[j * n + i]);  // symmetrized
      }
    }
    // identity with the raw kernel: K(N,y1;N,y2) = K_CD(y1,y2) e^{(y2^2-y1^2)/2}
    const LogScaledValue raw = minors::kernel_raw(N, y[0], N, y[2]);
    const double lhs = raw.sign *
                       std::exp(raw.log_magnitude +
                                0.5 * (y[0] * y[0] - y[2] * y[2]));
    CHECK(testsup::rel_diff(lhs, B[0 * n + 2]) < 1e-11);
  }
}

TEST_CASE("airy kernel anchors, symmetry, domain") {
  CHECK(testsup::rel_diff(minors::airy_kernel(0.0, 0.0),
                          0.066987483779663974144) < 1e-10);
  CHECK(testsup::rel_diff(minors::airy_kernel(1.0, 2.0),
                          0.0016246403966291770203) < 1e-9);
  CHECK(testsup::rel_diff(minors::airy_kernel(-3.0, 0.5),
                          -0.0035177932976885964987) < 1e-9);
  for (const auto& p : {std::pair<double, double>{-2.3, 1.1},
                        std::pair<double, double>{0.4, 5.0}}) {
    CHECK(minors::airy_kernel(p.first, p.second) ==
          doctest::Approx(minors::airy_kernel(p.second, p.first))
              .epsilon(1e-13));
  }
  CHECK(minors::airy_kernel(4.0, 4.0) > 0.0);  // diagonal is a density
  CHECK(minors::airy_kernel(10.0, 10.0) < 1e-9);
  CHECK_THROWS_AS(minors::airy_kernel(-15.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(minors::airy_kernel(0.0, -16.0), std::domain_error);
}

TEST_CASE("edge limit of the scaled diagonal is the airy kernel") {
  for (double yt : {-1.0, 0.0}) {
    const double target = minors::airy_kernel(yt, yt);
    double prev_dev = 1e9;
    for (long u : {100L, 400L, 1600L}) {
      const double scaled =
          minors::kernel_scaled(u, yt, u, yt) /
          (std::sqrt(2.0) * std::pow(static_cast<double>(u), 1.0 / 6.0));
      const double dev = std::fabs(scaled - target) / target;
      CHECK(dev < 0.15);
      CHECK(dev < prev_dev);
      prev_dev = dev;
    }
  }
}

}  // TEST_SUITE
