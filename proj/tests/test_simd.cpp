/* ---------------------------------------------------------------------------
 * test_simd.cpp -- scalar vs. AVX2 batched Hermite kernels.
 *
 * The contract is bitwise equality of the (mantissa, offset) tables, not
 * approximate agreement: both variants perform the identical sequence of
 * IEEE operations per lane.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "minors/simd.hpp"
#include "minors/special_functions.hpp"
#include "test_support.hpp"

namespace simd = minors::simd;

namespace {

struct Table {
  std::vector<double> mant, offs;
};

Table run(simd::psihat_table_fn fn, const std::vector<double>& x, int jmax) {
  Table t;
  t.mant.resize(x.size() * static_cast<std::size_t>(jmax));
  t.offs.resize(x.size() * static_cast<std::size_t>(jmax));
  fn(x.data(), x.size(), jmax, t.mant.data(), t.offs.data());
  return t;
}

bool bitwise_equal(const Table& a, const Table& b) {
  return a.mant.size() == b.mant.size() &&
         std::memcmp(a.mant.data(), b.mant.data(),
                     a.mant.size() * sizeof(double)) == 0 &&
         std::memcmp(a.offs.data(), b.offs.data(),
                     a.offs.size() * sizeof(double)) == 0;
}

// batches exercising remainder lanes (n not a multiple of 4) and the
// power-of-two renormalization (jmax deep enough that e^{-x^2/2} alone
// would underflow without offset tracking)
const std::vector<double> kXs = {-30.0, -11.5, -3.25, -0.5, 0.0,
                                 0.75,  4.5,   17.25, 30.0};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar kernel reproduces the value contract") {
  const int jmax = 140;
  const Table t = run(&simd::psihat_table_scalar, kXs, jmax);
  // cross-check a handful of entries against the double-double recurrence
  for (std::size_t i : {std::size_t{1}, std::size_t{3}, std::size_t{5}}) {
    const std::vector<testsup::dd> ref = testsup::psihat_dd(kXs[i], jmax - 1);
    for (int j : {0, 1, 17, 139}) {
      const double got =
          t.mant[static_cast<std::size_t>(j) * kXs.size() + i] *
          std::exp(t.offs[static_cast<std::size_t>(j) * kXs.size() + i]);
      const double want = ref[static_cast<std::size_t>(j)].hi;
      if (std::fabs(want) < 1e-280) continue;
      CHECK(testsup::rel_diff(got, want) < 1e-12);
    }
  }
}

TEST_CASE("offset tracking survives scales plain doubles cannot hold") {
  // at x = 30, e^{-x^2/2} = e^{-450}; with jmax = 2000 the mantissa pass
  // through the renormalization branch many times
  std::vector<double> xs = {30.0, -30.0, 1.0};
  const int jmax = 2000;
  const Table t = run(&simd::psihat_table_scalar, xs, jmax);
  for (double m : t.mant) CHECK(std::isfinite(m));
  for (double o : t.offs) CHECK(std::isfinite(o));
  // hhat_1999(30): log-magnitude must match the log-domain table
  std::vector<double> probe = {30.0};
  const minors::PsihatTable lt = minors::psihat_log_table(probe, jmax);
  const std::size_t j = 1999;
  const double got_log =
      std::log(std::fabs(t.mant[j * 3 + 0])) + t.offs[j * 3 + 0];
  CHECK(got_log == doctest::Approx(lt.ln(1999, 0)).epsilon(1e-12));
  CHECK((t.mant[j * 3 + 0] > 0 ? 1.0 : -1.0) == lt.sg(1999, 0));
}

TEST_CASE("dispatched kernel equals scalar bitwise") {
  const Table a = run(&simd::psihat_table_scalar, kXs, 600);
  const Table b = run(&simd::psihat_table, kXs, 600);
  CHECK(bitwise_equal(a, b));
}

#if defined(MINORS_HAVE_AVX2_TU)
TEST_CASE("avx2 kernel equals scalar bitwise, including remainder lanes") {
  if (!simd::cpu_supports_avx2()) {
    MESSAGE("AVX2 not available on this host; skipping");
    return;
  }
  for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{7},
                        std::size_t{9}}) {
    std::vector<double> xs(kXs.begin(), kXs.begin() + n);
    const Table a = run(&simd::psihat_table_scalar, xs, 2000);
    const Table b = run(&simd::psihat_table_avx2, xs, 2000);
    CHECK(bitwise_equal(a, b));
  }
}
#endif

TEST_CASE("set_backend test hook steers dispatch") {
  const simd::Backend before = simd::active_backend();
  simd::set_backend(simd::Backend::scalar);
  CHECK(simd::active_backend() == simd::Backend::scalar);
  CHECK(simd::backend_name() == "scalar");
  const Table a = run(&simd::psihat_table, kXs, 64);
  const Table s = run(&simd::psihat_table_scalar, kXs, 64);
  CHECK(bitwise_equal(a, s));
  simd::set_backend(before);
  CHECK(simd::active_backend() == before);
}

}  // TEST_SUITE
