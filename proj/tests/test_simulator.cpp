/* ---------------------------------------------------------------------------
 * test_simulator.cpp -- Gaussian arrays, coupled eigenvalue paths, path
 * statistics, serialization.
 *
 * The structural invariant everything rests on: one array is sampled once
 * (counter-keyed by entry position), and minors of different sizes are
 * literal sub-blocks, so enlarging an array never changes existing entries
 * and the eigenvalue path is exactly nondecreasing by interlacing.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "minors/simulator.hpp"
#include "test_support.hpp"

using minors::EigenPath;
using minors::EigenPathOptions;
using minors::GaussianMinorArray;

TEST_SUITE("simulator") {

TEST_CASE("array nesting: a larger array restricts to the smaller one") {
  const GaussianMinorArray small = minors::sample_array(11u, 3u, 8);
  const GaussianMinorArray big = minors::sample_array(11u, 3u, 16);
  REQUIRE(small.entries.size() == 36);
  for (std::size_t e = 0; e < small.entries.size(); ++e) {
    CHECK(small.entries[e] == big.entries[e]);  // bitwise, not approximate
  }
  // determinism and stream separation
  const GaussianMinorArray again = minors::sample_array(11u, 3u, 8);
  CHECK(again.entries == small.entries);
  const GaussianMinorArray other = minors::sample_array(11u, 4u, 8);
  CHECK(other.entries != small.entries);
}

TEST_CASE("array is Hermitian with real diagonal") {
  const GaussianMinorArray arr = minors::sample_array(5u, 0u, 12);
  for (long i = 0; i < 12; ++i) {
    CHECK(arr.at(i, i).imag() == 0.0);
    for (long j = 0; j < i; ++j) {
      CHECK(arr.at(i, j) == std::conj(arr.at(j, i)));
    }
  }
}

TEST_CASE("entry moments match the ensemble") {
  const long n = 600;
  const GaussianMinorArray arr = minors::sample_array(99u, 1u, n);
  double dsum = 0.0, dsq = 0.0;
  double ore = 0.0, ore2 = 0.0, oim = 0.0, oim2 = 0.0;
  long odiag = 0;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j <= i; ++j) {
      const std::complex<double> z = arr.at(i, j);
      if (i == j) {
        dsum += z.real();
        dsq += z.real() * z.real();
      } else {
        ++odiag;
        ore += z.real();
        ore2 += z.real() * z.real();
        oim += z.imag();
        oim2 += z.imag() * z.imag();
      }
    }
  }
  const double nd = static_cast<double>(n), no = static_cast<double>(odiag);
  // diagonal N(0, 1/2): 3-sigma windows on mean and second moment
  CHECK(std::fabs(dsum / nd) < 3.0 * std::sqrt(0.5 / nd));
  CHECK(std::fabs(dsq / nd - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / nd));
  // off-diagonal re/im N(0, 1/4)
  CHECK(std::fabs(ore / no) < 3.0 * std::sqrt(0.25 / no));
  CHECK(std::fabs(oim / no) < 3.0 * std::sqrt(0.25 / no));
  CHECK(std::fabs(ore2 / no - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / no));
  CHECK(std::fabs(oim2 / no - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / no));
}

TEST_CASE("smallest minors against closed forms") {
  const GaussianMinorArray arr = minors::sample_array(7u, 2u, 3);
  EigenPathOptions opt;
  opt.schedule = {1, 2, 3};
  const EigenPath p = minors::eigen_path(arr, opt);
  REQUIRE(p.lambda_raw.size() == 3);
  CHECK(p.lambda_raw[0] == doctest::Approx(arr.at(0, 0).real()).epsilon(1e-14));
  // 2x2 Hermitian: lambda_max = (a+d)/2 + sqrt(((a-d)/2)^2 + |b|^2)
  const double a = arr.at(0, 0).real();
  const double d = arr.at(1, 1).real();
  const double b2 = std::norm(arr.at(1, 0));
  const double expect =
      0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b2);
  CHECK(p.lambda_raw[1] == doctest::Approx(expect).epsilon(1e-13));
  CHECK(p.lambda_raw[2] >= p.lambda_raw[1]);  // interlacing
  CHECK(p.dense_solves == 3);
  // scaled coordinates recorded consistently
  for (int k = 0; k < 3; ++k) {
    CHECK(p.lambda_scaled[k] ==
          minors::scale_eigenvalue(p.schedule[k], p.lambda_raw[k]));
  }
}

TEST_CASE("scale_eigenvalue formula") {
  // the spectral edge sqrt(2n) maps to the scaled origin
  CHECK(std::fabs(minors::scale_eigenvalue(8, 4.0)) < 1e-14);
  const double got = minors::scale_eigenvalue(50, 10.2);
  const double expect =
      (10.2 - std::sqrt(100.0)) * std::sqrt(2.0) * std::pow(50.0, 1.0 / 6.0);
  CHECK(got == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("schedule validation") {
  const GaussianMinorArray arr = minors::sample_array(1u, 0u, 16);
  EigenPathOptions bad;
  bad.schedule = {4, 4};
  CHECK_THROWS_AS(minors::eigen_path(arr, bad), std::invalid_argument);
  bad.schedule = {8, 5};
  CHECK_THROWS_AS(minors::eigen_path(arr, bad), std::invalid_argument);
  bad.schedule = {1, 32};
  CHECK_THROWS_AS(minors::eigen_path(arr, bad), std::invalid_argument);
  bad.schedule = {0, 4};
  CHECK_THROWS_AS(minors::eigen_path(arr, bad), std::invalid_argument);
  // empty schedule means every minor size
  const EigenPath full = minors::eigen_path(arr);
  REQUIRE(full.schedule.size() == 16);
  CHECK(full.schedule.front() == 1);
  CHECK(full.schedule.back() == 16);
  CHECK_THROWS_AS(minors::sample_array(1u, 0u, 0), std::invalid_argument);
}

TEST_CASE("full tracker paths are exactly nondecreasing") {
  for (std::uint64_t stream = 0; stream < 30; ++stream) {
    const GaussianMinorArray arr = minors::sample_array(314159u, stream, 96);
    const EigenPath p = minors::eigen_path(arr);  // tracker on by default
    for (std::size_t k = 1; k < p.lambda_raw.size(); ++k) {
      CHECK(p.lambda_raw[k] >= p.lambda_raw[k - 1]);
    }
  }
}

TEST_CASE("tracker and dense routes agree on the same array") {
  const GaussianMinorArray arr = minors::sample_array(2718u, 5u, 256);
  EigenPathOptions dense;
  dense.use_tracker = false;
  const EigenPath pd = minors::eigen_path(arr, dense);
  const EigenPath pt = minors::eigen_path(arr);
  REQUIRE(pd.lambda_raw.size() == pt.lambda_raw.size());
  CHECK(pd.dense_solves == 256);
  CHECK(pt.dense_solves < pd.dense_solves);  // the tracker actually engaged
  double worst = 0.0;
  for (std::size_t k = 0; k < pd.lambda_raw.size(); ++k) {
    worst = std::max(worst, std::fabs(pd.lambda_raw[k] - pt.lambda_raw[k]));
    if (k > 0) {
      CHECK(pd.lambda_raw[k] >= pd.lambda_raw[k - 1]);
      CHECK(pt.lambda_raw[k] >= pt.lambda_raw[k - 1]);
    }
  }
  CHECK(worst < 1e-3);  // tracker tolerance, tightened by the repair sweep
}

TEST_CASE("largest minor eigenvalue sits at the spectral edge") {
  const long N = 256;
  const double edge = std::sqrt(2.0 * static_cast<double>(N));
  double sum_ratio = 0.0, sum_scaled = 0.0;
  const long n_paths = 200;
  EigenPathOptions opt;
  opt.schedule = {N};
  opt.use_tracker = false;
  for (long s = 0; s < n_paths; ++s) {
    const GaussianMinorArray arr =
        minors::sample_array(60180u, static_cast<std::uint64_t>(s), N);
    const EigenPath p = minors::eigen_path(arr, opt);
    sum_ratio += p.lambda_raw[0] / edge;
    sum_scaled += p.lambda_scaled[0];
  }
  const double mean_ratio = sum_ratio / n_paths;
  const double mean_scaled = sum_scaled / n_paths;
  CHECK(mean_ratio > 0.95);
  CHECK(mean_ratio < 1.05);
  // edge fluctuations center near the known mean of the limiting law
  CHECK(mean_scaled > -2.15);
  CHECK(mean_scaled < -1.40);
}

TEST_CASE("running extremes skip n < 3 and track the hand computation") {
  EigenPath p;
  p.n_max = 6;
  p.schedule = {1, 2, 3, 4, 5, 6};
  p.lambda_scaled = {5.0, -9.0, 1.2, -0.4, 2.0, -3.1};
  p.lambda_raw = p.lambda_scaled;  // unused by the statistics
  const minors::PathStatistics st = minors::running_extremes(p);
  REQUIRE(st.n.size() == 4);  // n = 3, 4, 5, 6
  CHECK(st.n.front() == 3);
  double rmax = -1e300, rmin = 1e300;
  std::size_t idx = 0;
  for (long n = 3; n <= 6; ++n, ++idx) {
    const double ln = std::log(static_cast<double>(n));
    const double v = p.lambda_scaled[static_cast<std::size_t>(n - 1)];
    rmax = std::max(rmax, v / std::pow(ln, 2.0 / 3.0));
    rmin = std::min(rmin, v / std::cbrt(ln));
    CHECK(st.running_max_frac23[idx] == doctest::Approx(rmax).epsilon(1e-15));
    CHECK(st.running_min_frac13[idx] == doctest::Approx(rmin).epsilon(1e-15));
  }
}

TEST_CASE("subsequence events: frequencies, cumulative counts, guards") {
  // two hand-built paths sharing schedule {4, 9, 16}
  auto mk = [](std::vector<double> scaled) {
    EigenPath p;
    p.n_max = 16;
    p.schedule = {4, 9, 16};
    p.lambda_scaled = std::move(scaled);
    p.lambda_raw = p.lambda_scaled;
    return p;
  };
  // alpha = 2: k = 2,3,4 -> N_k = 4, 9, 16 (k = 1 gives N = 1, skipped)
  std::vector<EigenPath> paths = {mk({10.0, 0.0, 10.0}), mk({10.0, 10.0, -10.0})};
  const minors::SubsequenceEvents ev =
      minors::subsequence_events(paths, 2.0, 1.0, minors::TailSide::upper);
  REQUIRE(ev.k.size() == 3);
  CHECK(ev.n_k[0] == 4);
  CHECK(ev.n_k[1] == 9);
  CHECK(ev.n_k[2] == 16);
  CHECK(ev.frequency[0] == 1.0);   // both paths exceed at N = 4
  CHECK(ev.frequency[1] == 0.5);   // one of two
  CHECK(ev.frequency[2] == 0.5);
  CHECK(ev.mean_s_n[0] == 1.0);    // cumulative: 1, 1.5, 2
  CHECK(ev.mean_s_n[1] == 1.5);
  CHECK(ev.mean_s_n[2] == 2.0);
  CHECK(!ev.truncated);

  // an absurd threshold sees no events on either side
  const minors::SubsequenceEvents none =
      minors::subsequence_events(paths, 2.0, 1000.0, minors::TailSide::upper);
  for (double f : none.frequency) CHECK(f == 0.0);

  // lower-tail side counts dips below -c (log N)^{1/3}
  const minors::SubsequenceEvents low =
      minors::subsequence_events(paths, 2.0, 3.0, minors::TailSide::lower);
  CHECK(low.frequency[2] == 0.5);  // only the -10 at N = 16

  // guards
  CHECK_THROWS_AS(minors::subsequence_events({}, 2.0, 1.0,
                                             minors::TailSide::upper),
                  std::invalid_argument);
  CHECK_THROWS_AS(minors::subsequence_events(paths, 1.0, 1.0,
                                             minors::TailSide::upper),
                  std::invalid_argument);
  CHECK_THROWS_AS(minors::subsequence_events(paths, 2.0, 0.0,
                                             minors::TailSide::upper),
                  std::invalid_argument);
  // missing N_k in a schedule is an error, not a silent skip
  EigenPath gap;
  gap.n_max = 16;
  gap.schedule = {4, 16};
  gap.lambda_scaled = {0.0, 0.0};
  gap.lambda_raw = gap.lambda_scaled;
  CHECK_THROWS_AS(minors::subsequence_events({gap}, 2.0, 1.0,
                                             minors::TailSide::upper),
                  std::invalid_argument);

  // unequal n_max: the shorter path truncates the ladder and says so
  EigenPath longer;
  longer.n_max = 25;
  longer.schedule = {4, 9, 16, 25};
  longer.lambda_scaled = {0.0, 0.0, 0.0, 0.0};
  longer.lambda_raw = longer.lambda_scaled;
  const minors::SubsequenceEvents tr = minors::subsequence_events(
      {paths[0], longer}, 2.0, 1.0, minors::TailSide::upper);
  CHECK(tr.truncated);
  CHECK(tr.n_k.back() == 16);
}

TEST_CASE("empirical cdf") {
  const std::vector<double> s = {1.0, 2.0, 3.0, 4.0};
  const minors::EmpiricalCdf mid = minors::empirical_cdf(s, 2.5);
  CHECK(mid.value == 0.5);
  CHECK(mid.std_error == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(minors::empirical_cdf(s, 0.5).value == 0.0);
  CHECK(minors::empirical_cdf(s, 4.0).value == 1.0);  // weak inequality
  CHECK(minors::empirical_cdf(s, 9.0).std_error == 0.0);
  CHECK_THROWS_AS(minors::empirical_cdf({}, 0.0), std::invalid_argument);
}

TEST_CASE("paths csv: header, shape, round-trip floats, determinism") {
  const GaussianMinorArray arr = minors::sample_array(31u, 0u, 6);
  EigenPathOptions opt;
  opt.schedule = {2, 4, 6};
  const EigenPath p = minors::eigen_path(arr, opt);
  const std::string csv = minors::paths_csv({p, p});
  // header + 2 paths x 3 rows
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t nl = csv.find('\n', pos);
    REQUIRE(nl != std::string::npos);  // every line is '\n'-terminated
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "path_id,N,lambda_raw,lambda_scaled");
  CHECK(lines[1].substr(0, 4) == "0,2,");
  CHECK(lines[4].substr(0, 4) == "1,2,");
  // shortest round-trip floats: reparsing reproduces the doubles exactly
  {
    const std::string& row = lines[3];  // 0,6,...
    const std::size_t c1 = row.find(',');
    const std::size_t c2 = row.find(',', c1 + 1);
    const std::size_t c3 = row.find(',', c2 + 1);
    const double raw = std::strtod(row.c_str() + c2 + 1, nullptr);
    const double scl = std::strtod(row.c_str() + c3 + 1, nullptr);
    CHECK(raw == p.lambda_raw[2]);
    CHECK(scl == p.lambda_scaled[2]);
    CHECK(row.find('.') != std::string::npos);  // '.' decimal separator
  }
  CHECK(minors::paths_csv({p, p}) == csv);  // byte determinism
}

TEST_CASE("checkpoint round-trip and corruption detection") {
  const GaussianMinorArray arr = minors::sample_array(77u, 9u, 12);
  EigenPathOptions opt;
  opt.schedule = {3, 7, 12};
  const EigenPath p = minors::eigen_path(arr, opt);
  const std::string path = "/tmp/minors_test_ckpt.bin";
  minors::write_checkpoint(path, p, 77u, 9u);
  std::uint64_t seed = 0, stream = 0;
  const EigenPath q = minors::read_checkpoint(path, &seed, &stream);
  CHECK(seed == 77u);
  CHECK(stream == 9u);
  CHECK(q.n_max == p.n_max);
  REQUIRE(q.schedule == p.schedule);
  CHECK(q.lambda_raw == p.lambda_raw);      // bitwise
  CHECK(q.lambda_scaled == p.lambda_scaled);

  // corrupt magic
  std::string blob = testsup::read_file(path);
  blob[0] = 'X';
  testsup::write_file(path, blob);
  CHECK_THROWS_AS(minors::read_checkpoint(path), std::runtime_error);
  // truncated payload
  testsup::write_file(path, testsup::read_file(path).substr(0, 0));
  minors::write_checkpoint(path, p, 77u, 9u);
  blob = testsup::read_file(path);
  testsup::write_file(path, blob.substr(0, blob.size() / 2));
  CHECK_THROWS_AS(minors::read_checkpoint(path), std::runtime_error);
  std::remove(path.c_str());
}

}  // TEST_SUITE
