/* ---------------------------------------------------------------------------
 * parallel.hpp -- tiny blocked parallel_for over an index range.
 *
 * Sweep points and Monte-Carlo paths are independent tasks; everything else
 * in the library is pure.  Worker count resolution order: explicit argument,
 * MINORS_WORKERS environment variable, hardware concurrency.
 * ------------------------------------------------------------------------- */
#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace minors {

inline int default_workers() {
  if (const char* env = std::getenv("MINORS_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Calls fn(i) for i in [0, n) using at most `workers` threads.  Static
// contiguous partition: tasks of similar cost, deterministic per-index work.
inline void parallel_for(long n, int workers,
                         const std::function<void(long)>& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || n == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  int nthreads = static_cast<int>(workers < n ? workers : n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    long lo = n * t / nthreads;
    long hi = n * (t + 1) / nthreads;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace minors
