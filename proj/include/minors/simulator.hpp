/* ---------------------------------------------------------------------------
 * simulator.hpp -- coupled minor eigenvalue paths of one Gaussian array.
 *
 * One doubly-infinite Hermitian Gaussian array Z (off-diagonal entries
 * complex with independent N(0, 1/4) real/imaginary parts, diagonal real
 * N(0, 1/2)) is materialized to size N_max; lambda_raw[N] is the largest
 * eigenvalue of the leading N x N minor and
 *
 *     lambda_scaled[N] = (lambda_raw[N] - sqrt(2N)) sqrt(2) N^{1/6}.
 *
 * Cauchy interlacing makes lambda_raw nondecreasing in N exactly; the
 * eigensolver pipeline preserves that (dense solves where it matters, a
 * warm-started Lanczos tracker with a dense repair sweep on full paths).
 * ------------------------------------------------------------------------- */
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace minors {

struct GaussianMinorArray {
  long size = 0;                    // N_max
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  // lower triangle (i >= j), row-packed: entry (i,j) at i(i+1)/2 + j;
  // diagonal entries have zero imaginary part.
  std::vector<std::complex<double>> entries;

  std::complex<double> at(long i, long j) const {
    if (i >= j) return entries[(std::size_t)i * (i + 1) / 2 + j];
    return std::conj(entries[(std::size_t)j * (j + 1) / 2 + i]);
  }
};

GaussianMinorArray sample_array(std::uint64_t seed, std::uint64_t stream_id,
                                long n_max);

struct EigenPath {
  long n_max = 0;
  std::vector<long> schedule;        // minor sizes N, strictly increasing
  std::vector<double> lambda_raw;    // same length as schedule
  std::vector<double> lambda_scaled;
  long dense_solves = 0;             // diagnostics
  long tracker_fallbacks = 0;
  long repair_recomputes = 0;
};

struct EigenPathOptions {
  // empty schedule => every N in 1..n_max
  std::vector<long> schedule;
  // warm Lanczos tracker for consecutive schedules (sizes >= 64); dense
  // bisection-based solves otherwise and as repair
  bool use_tracker = true;
  double tracker_rtol = 1e-2;
};

EigenPath eigen_path(const GaussianMinorArray& array,
                     const EigenPathOptions& opt = {});

double scale_eigenvalue(long n, double lambda_raw);

struct PathStatistics {
  std::vector<long> n;                    // n >= 3
  std::vector<double> running_max_frac23; // max_{m<=n} scaled/(log m)^{2/3}
  std::vector<double> running_min_frac13; // min_{m<=n} scaled/(log m)^{1/3}
};

PathStatistics running_extremes(const EigenPath& path);

enum class TailSide { upper, lower };

struct SubsequenceEvents {
  std::vector<long> k;
  std::vector<long> n_k;            // ceil(k^alpha)
  std::vector<double> frequency;    // event frequency over paths at each k
  std::vector<double> mean_s_n;     // mean over paths of the event count
                                    // S_{N_k} = #{k' <= k : event at k'}
  bool truncated = false;           // some N_k exceeded available paths
};

// Events: lambda_scaled(N_k) >= c (log N_k)^{2/3}   (upper)
//         lambda_scaled(N_k) <= -c (log N_k)^{1/3}  (lower)
// Paths must share one schedule containing every needed N_k.
SubsequenceEvents subsequence_events(const std::vector<EigenPath>& paths,
                                     double alpha, double c, TailSide tail);

struct EmpiricalCdf {
  double value = 0.0;
  double std_error = 0.0;
};

EmpiricalCdf empirical_cdf(const std::vector<double>& samples, double t);

// CSV serialization: header path_id,N,lambda_raw,lambda_scaled, one row per
// schedule entry per path, shortest round-trip floats, '\n' line endings.
std::string paths_csv(const std::vector<EigenPath>& paths);
void write_paths_csv(const std::string& path,
                     const std::vector<EigenPath>& paths);

// Binary checkpoint (magic 'MNRC', schema version, seed/stream provenance).
void write_checkpoint(const std::string& path, const EigenPath& p,
                      std::uint64_t seed, std::uint64_t stream);
EigenPath read_checkpoint(const std::string& path, std::uint64_t* seed = nullptr,
                          std::uint64_t* stream = nullptr);

}  // namespace minors
