/* ---------------------------------------------------------------------------
 * simulator.cpp -- eigenvalue paths of nested Gaussian minors.
 *
 * Eigensolver pipeline.  Small minors (N <= 16) and non-consecutive
 * schedule steps go through dense LAPACK (zheevr, largest eigenvalue with
 * vector).  Along a consecutive schedule at N >= 64 the top eigenpair moves
 * very little per step, so a warm-started Lanczos tracker is much cheaper:
 * the previous top eigenvector (zero-padded, plus a small kick on the new
 * coordinate so the start is never orthogonal to the new direction) seeds a
 * Lanczos run with one-pass full reorthogonalization; the Ritz residual
 * beta_K |last tridiagonal eigenvector component| is checked every second
 * step and the run stops below tracker_rtol.  A failed run falls back to a
 * dense solve (counted in tracker_fallbacks).
 *
 * Cauchy interlacing makes the true lambda_raw nondecreasing along nested
 * minors, and the per-step increments (~N^{-1/3} in scaled units) are many
 * orders above the dense solver's rounding, so any adjacent decrease in the
 * computed path is solver error: a repair pass recomputes both endpoints of
 * every dip densely (up to 3 sweeps, then dense from the first surviving
 * violation onward).
 * ------------------------------------------------------------------------- */
#include "minors/simulator.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <lapacke.h>
#include <limits>
#include <stdexcept>

#include "minors/rng.hpp"

#include "format_detail.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace minors {

namespace {

using cd = std::complex<double>;

void ensure_single_threaded_blas() {
  static const bool once = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}

constexpr int kDenseAlways = 16;   // below this, dense is fastest anyway
constexpr int kTrackerMinN = 64;   // tracker engages from this size
constexpr int kLanczosMax = 130;   // Krylov basis budget per step

// Dense top eigenpair of the leading n x n minor stored (lower, col-major,
// leading dimension lda) in a.
double dense_top_eigenpair(const std::vector<cd>& a, long lda, long n,
                           std::vector<cd>* vec) {
  std::vector<cd> w(static_cast<std::size_t>(n) * n);
  for (long c = 0; c < n; ++c)
    for (long i = c; i < n; ++i)
      w[static_cast<std::size_t>(c) * n + i] =
          a[static_cast<std::size_t>(c) * lda + i];
  std::vector<double> evs(n);
  std::vector<cd> z(static_cast<std::size_t>(n));
  std::vector<lapack_int> isuppz(2);
  lapack_int found = 0;
  const int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, vec ? 'V' : 'N', 'I', 'L', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(w.data()),
      static_cast<lapack_int>(n), 0.0, 0.0, static_cast<lapack_int>(n),
      static_cast<lapack_int>(n), 0.0, &found, evs.data(),
      reinterpret_cast<lapack_complex_double*>(z.data()),
      static_cast<lapack_int>(n), isuppz.data());
  if (info != 0 || found < 1)
    throw std::runtime_error("zheevr failed, info = " + std::to_string(info));
  if (vec) vec->assign(z.begin(), z.begin() + n);
  return evs[0];
}

struct LanczosWorkspace {
  std::vector<cd> basis;  // n_max x kLanczosMax, col-major
  std::vector<cd> w, ritz;
  std::vector<double> alpha, beta;
};

// Returns true on convergence, filling *theta and *vec (the Ritz vector).
bool lanczos_top(const std::vector<cd>& a, long lda, long n,
                 const std::vector<cd>& v_start, double rtol,
                 LanczosWorkspace& ws, double* theta, std::vector<cd>* vec) {
  const cd one{1.0, 0.0}, zero{0.0, 0.0};
  const int kmax = std::min<long>(kLanczosMax - 1, n);
  ws.basis.resize(static_cast<std::size_t>(lda) * kLanczosMax);
  ws.w.resize(n);
  ws.ritz.resize(n);
  ws.alpha.resize(kLanczosMax);
  ws.beta.resize(kLanczosMax);

  cd* q0 = ws.basis.data();
  for (long i = 0; i < n; ++i) q0[i] = (i < (long)v_start.size()) ? v_start[i] : zero;
  q0[n - 1] += cd{0.01, 0.0};  // kick onto the new coordinate
  const double nrm = cblas_dznrm2(static_cast<int>(n), q0, 1);
  cblas_zdscal(static_cast<int>(n), 1.0 / nrm, q0, 1);

  std::vector<double> d_t, e_t, evals_z;
  for (int K = 0; K < kmax; ++K) {
    cd* qk = ws.basis.data() + static_cast<std::size_t>(K) * lda;
    cblas_zhemv(CblasColMajor, CblasLower, static_cast<int>(n), &one, a.data(),
                static_cast<int>(lda), qk, 1, &zero, ws.w.data(), 1);
    cd dot;
    cblas_zdotc_sub(static_cast<int>(n), qk, 1, ws.w.data(), 1, &dot);
    ws.alpha[K] = dot.real();
    for (long i = 0; i < n; ++i) ws.w[i] -= ws.alpha[K] * qk[i];
    if (K > 0) {
      const cd* qm = ws.basis.data() + static_cast<std::size_t>(K - 1) * lda;
      for (long i = 0; i < n; ++i) ws.w[i] -= ws.beta[K - 1] * qm[i];
    }
    for (int c = 0; c <= K; ++c) {  // one-pass full reorthogonalization
      const cd* qc = ws.basis.data() + static_cast<std::size_t>(c) * lda;
      cd d;
      cblas_zdotc_sub(static_cast<int>(n), qc, 1, ws.w.data(), 1, &d);
      for (long i = 0; i < n; ++i) ws.w[i] -= d * qc[i];
    }
    ws.beta[K] = cblas_dznrm2(static_cast<int>(n), ws.w.data(), 1);

    const bool exhausted = ws.beta[K] < 1e-13;
    if ((K >= 3 && K % 2 == 1) || K == kmax - 1 || exhausted) {
      const int m = K + 1;
      d_t.assign(ws.alpha.begin(), ws.alpha.begin() + m);
      e_t.assign(ws.beta.begin(), ws.beta.begin() + (m > 1 ? m - 1 : 0));
      evals_z.assign(static_cast<std::size_t>(m) * m, 0.0);
      const int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, d_t.data(),
                                     e_t.data(), evals_z.data(), m);
      if (info != 0)
        throw std::runtime_error("dstev failed, info = " + std::to_string(info));
      const double candidate = d_t[m - 1];  // ascending order: last = largest
      const double last_component =
          std::fabs(evals_z[static_cast<std::size_t>(m - 1) * m + (m - 1)]);
      const double resid = ws.beta[K] * last_component;
      if (resid <= rtol || exhausted) {
        for (long i = 0; i < n; ++i) ws.ritz[i] = zero;
        for (int c = 0; c < m; ++c) {
          const double yc = evals_z[static_cast<std::size_t>(m - 1) * m + c];
          const cd* qc = ws.basis.data() + static_cast<std::size_t>(c) * lda;
          for (long i = 0; i < n; ++i) ws.ritz[i] += yc * qc[i];
        }
        *theta = candidate;
        vec->assign(ws.ritz.begin(), ws.ritz.begin() + n);
        return true;
      }
    }
    if (!exhausted) {
      cd* qn = ws.basis.data() + static_cast<std::size_t>(K + 1) * lda;
      for (long i = 0; i < n; ++i) qn[i] = ws.w[i] / ws.beta[K];
    }
  }
  return false;
}

}  // namespace

GaussianMinorArray sample_array(std::uint64_t seed, std::uint64_t stream_id,
                                long n_max) {
  if (n_max < 1) throw std::invalid_argument("sample_array: n_max >= 1");
  GaussianMinorArray arr;
  arr.size = n_max;
  arr.seed = seed;
  arr.stream_id = stream_id;
  arr.entries.resize(static_cast<std::size_t>(n_max) * (n_max + 1) / 2);
  const double diag_scale = 0.70710678118654752440;  // sqrt(1/2)
  for (long i = 0; i < n_max; ++i) {
    const std::size_t row_base = static_cast<std::size_t>(i) * (i + 1) / 2;
    for (long j = 0; j <= i; ++j) {
      const std::uint64_t idx = row_base + static_cast<std::uint64_t>(j);
      const NormalPair g = philox_normal_pair(seed, stream_id, idx);
      arr.entries[row_base + j] = (i == j)
                                      ? cd{g.g1 * diag_scale, 0.0}
                                      : cd{0.5 * g.g1, 0.5 * g.g2};
    }
  }
  return arr;
}

double scale_eigenvalue(long n, double lambda_raw) {
  const double nn = static_cast<double>(n);
  return (lambda_raw - std::sqrt(2.0 * nn)) * 1.4142135623730950488 *
         std::pow(nn, 1.0 / 6.0);
}

EigenPath eigen_path(const GaussianMinorArray& array,
                     const EigenPathOptions& opt) {
  ensure_single_threaded_blas();
  EigenPath path;
  path.n_max = array.size;
  if (opt.schedule.empty()) {
    path.schedule.resize(array.size);
    for (long i = 0; i < array.size; ++i) path.schedule[i] = i + 1;
  } else {
    path.schedule = opt.schedule;
    for (std::size_t k = 0; k < path.schedule.size(); ++k) {
      if (path.schedule[k] < 1 || path.schedule[k] > array.size)
        throw std::invalid_argument("eigen_path: schedule entry outside "
                                    "[1, n_max]");
      if (k > 0 && path.schedule[k] <= path.schedule[k - 1])
        throw std::invalid_argument("eigen_path: schedule must be strictly "
                                    "increasing");
    }
  }

  // full lower-triangular matrix, col-major, lda = n_max; the leading n x n
  // corner is exactly the n-th minor
  const long lda = array.size;
  std::vector<cd> a(static_cast<std::size_t>(lda) * lda, cd{0.0, 0.0});
  for (long i = 0; i < array.size; ++i)
    for (long j = 0; j <= i; ++j)
      a[static_cast<std::size_t>(j) * lda + i] = array.at(i, j);

  const std::size_t steps = path.schedule.size();
  path.lambda_raw.resize(steps);
  path.lambda_scaled.resize(steps);

  LanczosWorkspace ws;
  std::vector<cd> vprev;
  long prev_n = -1;
  bool tracker_used = false;

  for (std::size_t k = 0; k < steps; ++k) {
    const long n = path.schedule[k];
    const bool consecutive = (n == prev_n + 1) && !vprev.empty();
    bool solved = false;
    if (opt.use_tracker && consecutive && n >= kTrackerMinN &&
        n > kDenseAlways) {
      double theta = 0.0;
      std::vector<cd> v;
      if (lanczos_top(a, lda, n, vprev, opt.tracker_rtol, ws, &theta, &v)) {
        path.lambda_raw[k] = theta;
        vprev = std::move(v);
        solved = true;
        tracker_used = true;
      } else {
        ++path.tracker_fallbacks;
      }
    }
    if (!solved) {
      path.lambda_raw[k] = dense_top_eigenpair(a, lda, n, &vprev);
      ++path.dense_solves;
    }
    path.lambda_scaled[k] = scale_eigenvalue(n, path.lambda_raw[k]);
    prev_n = n;
  }

  // repair pass: interlacing guarantees the exact path is nondecreasing
  if (tracker_used) {
    for (int sweep = 0; sweep < 3; ++sweep) {
      bool any = false;
      for (std::size_t k = 0; k + 1 < steps; ++k) {
        if (path.lambda_raw[k + 1] < path.lambda_raw[k]) {
          any = true;
          for (std::size_t r : {k, k + 1}) {
            path.lambda_raw[r] =
                dense_top_eigenpair(a, lda, path.schedule[r], nullptr);
            path.lambda_scaled[r] =
                scale_eigenvalue(path.schedule[r], path.lambda_raw[r]);
            ++path.repair_recomputes;
          }
        }
      }
      if (!any) break;
    }
    for (std::size_t k = 0; k + 1 < steps; ++k) {
      if (path.lambda_raw[k + 1] < path.lambda_raw[k]) {
        // stubborn dip: dense from here on
        for (std::size_t r = k; r < steps; ++r) {
          path.lambda_raw[r] =
              dense_top_eigenpair(a, lda, path.schedule[r], nullptr);
          path.lambda_scaled[r] =
              scale_eigenvalue(path.schedule[r], path.lambda_raw[r]);
          ++path.repair_recomputes;
        }
        break;
      }
    }
  }
  return path;
}

PathStatistics running_extremes(const EigenPath& path) {
  PathStatistics st;
  double run_max = -std::numeric_limits<double>::infinity();
  double run_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.schedule.size(); ++k) {
    const long n = path.schedule[k];
    if (n < 3) continue;  // (log n)^{2/3} only meaningful once log n > 1
    const double ln = std::log(static_cast<double>(n));
    run_max = std::max(run_max, path.lambda_scaled[k] / std::pow(ln, 2.0 / 3.0));
    run_min = std::min(run_min, path.lambda_scaled[k] / std::cbrt(ln));
    st.n.push_back(n);
    st.running_max_frac23.push_back(run_max);
    st.running_min_frac13.push_back(run_min);
  }
  return st;
}

SubsequenceEvents subsequence_events(const std::vector<EigenPath>& paths,
                                     double alpha, double c, TailSide tail) {
  if (paths.empty())
    throw std::invalid_argument("subsequence_events: need at least one path");
  if (!(alpha > 1.0))
    throw std::invalid_argument("subsequence_events: alpha must be > 1");
  if (!(c > 0.0))
    throw std::invalid_argument("subsequence_events: c must be > 0");

  long n_lo = paths.front().n_max, n_hi = paths.front().n_max;
  for (const EigenPath& p : paths) {
    n_lo = std::min(n_lo, p.n_max);
    n_hi = std::max(n_hi, p.n_max);
  }

  SubsequenceEvents ev;
  ev.truncated = (n_lo < n_hi);
  for (long k = 1;; ++k) {
    const long nk = static_cast<long>(
        std::ceil(std::pow(static_cast<double>(k), alpha)));
    if (nk > n_lo) {
      if (nk <= n_hi) ev.truncated = true;
      break;
    }
    if (nk < 3) continue;  // need log N_k safely positive
    const double ln = std::log(static_cast<double>(nk));
    const double norm = (tail == TailSide::upper) ? std::pow(ln, 2.0 / 3.0)
                                                  : std::cbrt(ln);
    double freq = 0.0;
    for (const EigenPath& p : paths) {
      const auto it = std::lower_bound(p.schedule.begin(), p.schedule.end(), nk);
      if (it == p.schedule.end() || *it != nk)
        throw std::invalid_argument(
            "subsequence_events: N_k = " + std::to_string(nk) +
            " missing from a path schedule");
      const double s =
          p.lambda_scaled[static_cast<std::size_t>(it - p.schedule.begin())] /
          norm;
      const bool hit = (tail == TailSide::upper) ? (s >= c) : (s <= -c);
      if (hit) freq += 1.0;
    }
    ev.k.push_back(k);
    ev.n_k.push_back(nk);
    ev.frequency.push_back(freq / static_cast<double>(paths.size()));
    // mean of S_{N_k} = #{k' <= k : event at k'}; a running sum of the
    // per-k frequencies since expectation is linear over the same paths
    const double prev = ev.mean_s_n.empty() ? 0.0 : ev.mean_s_n.back();
    ev.mean_s_n.push_back(prev + ev.frequency.back());
  }
  return ev;
}

EmpiricalCdf empirical_cdf(const std::vector<double>& samples, double t) {
  if (samples.empty())
    throw std::invalid_argument("empirical_cdf: no samples");
  std::size_t hits = 0;
  for (double s : samples)
    if (s <= t) ++hits;
  const double n = static_cast<double>(samples.size());
  EmpiricalCdf e;
  e.value = static_cast<double>(hits) / n;
  e.std_error = std::sqrt(std::max(0.0, e.value * (1.0 - e.value) / n));
  return e;
}

/* --- serialization ---------------------------------------------------------- */

using detail::fmt_double;

std::string paths_csv(const std::vector<EigenPath>& paths) {
  std::string out = "path_id,N,lambda_raw,lambda_scaled\n";
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t k = 0; k < paths[p].schedule.size(); ++k) {
      out += std::to_string(p);
      out += ',';
      out += std::to_string(paths[p].schedule[k]);
      out += ',';
      out += fmt_double(paths[p].lambda_raw[k]);
      out += ',';
      out += fmt_double(paths[p].lambda_scaled[k]);
      out += '\n';
    }
  return out;
}

void write_paths_csv(const std::string& path,
                     const std::vector<EigenPath>& paths) {
  std::ofstream out(path, std::ios::binary);  // binary: exactly '\n'
  if (!out)
    throw std::runtime_error("write_paths_csv: cannot open " + path);
  out << paths_csv(paths);
  if (!out.good())
    throw std::runtime_error("write_paths_csv: write failed for " + path);
}

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'N', 'R', 'C'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

void write_checkpoint(const std::string& path, const EigenPath& p,
                      std::uint64_t seed, std::uint64_t stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_checkpoint: cannot open " + path);
  out.write(kCheckpointMagic, 4);
  put(out, kCheckpointVersion);
  put(out, seed);
  put(out, stream);
  put(out, static_cast<std::int64_t>(p.n_max));
  put(out, static_cast<std::uint64_t>(p.schedule.size()));
  for (long n : p.schedule) put(out, static_cast<std::int64_t>(n));
  for (double v : p.lambda_raw) put(out, v);
  for (double v : p.lambda_scaled) put(out, v);
  put(out, static_cast<std::int64_t>(p.dense_solves));
  put(out, static_cast<std::int64_t>(p.tracker_fallbacks));
  put(out, static_cast<std::int64_t>(p.repair_recomputes));
  if (!out.good())
    throw std::runtime_error("write_checkpoint: write failed for " + path);
}

EigenPath read_checkpoint(const std::string& path, std::uint64_t* seed,
                          std::uint64_t* stream) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_checkpoint: cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in.good() || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw std::runtime_error("read_checkpoint: bad magic in " + path);
  std::uint32_t version = 0;
  get(in, version);
  if (version != kCheckpointVersion)
    throw std::runtime_error("read_checkpoint: unsupported schema version " +
                             std::to_string(version));
  std::uint64_t s = 0, st = 0;
  get(in, s);
  get(in, st);
  if (seed) *seed = s;
  if (stream) *stream = st;
  EigenPath p;
  std::int64_t n_max = 0;
  get(in, n_max);
  p.n_max = static_cast<long>(n_max);
  std::uint64_t len = 0;
  get(in, len);
  if (!in.good() || len > (1u << 26))
    throw std::runtime_error("read_checkpoint: corrupt length field");
  p.schedule.resize(len);
  for (std::uint64_t i = 0; i < len; ++i) {
    std::int64_t v = 0;
    get(in, v);
    p.schedule[i] = static_cast<long>(v);
  }
  p.lambda_raw.resize(len);
  for (std::uint64_t i = 0; i < len; ++i) get(in, p.lambda_raw[i]);
  p.lambda_scaled.resize(len);
  for (std::uint64_t i = 0; i < len; ++i) get(in, p.lambda_scaled[i]);
  std::int64_t d = 0, f = 0, r = 0;
  get(in, d);
  get(in, f);
  get(in, r);
  if (!in.good())
    throw std::runtime_error("read_checkpoint: truncated file " + path);
  p.dense_solves = static_cast<long>(d);
  p.tracker_fallbacks = static_cast<long>(f);
  p.repair_recomputes = static_cast<long>(r);
  return p;
}

}  // namespace minors
