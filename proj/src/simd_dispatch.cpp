/* ---------------------------------------------------------------------------
 * simd_dispatch.cpp -- runtime backend selection for the batched kernels.
 *
 * Default: AVX2 when compiled in and CPUID reports AVX2+FMA, else scalar.
 * MINORS_SIMD=scalar|avx2 overrides (an avx2 request on unsupported
 * hardware falls back to scalar rather than faulting).
 * ------------------------------------------------------------------------- */
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "minors/simd.hpp"

namespace minors::simd {

bool cpu_supports_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend resolve_initial() {
#if defined(MINORS_HAVE_AVX2_TU)
  bool hw = cpu_supports_avx2();
#else
  bool hw = false;
#endif
  if (const char* env = std::getenv("MINORS_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0)
      return hw ? Backend::avx2 : Backend::scalar;
  }
  return hw ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{resolve_initial()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
#if !defined(MINORS_HAVE_AVX2_TU)
  b = Backend::scalar;
#else
  if (b == Backend::avx2 && !cpu_supports_avx2()) b = Backend::scalar;
#endif
  backend_slot().store(b, std::memory_order_relaxed);
}

std::string backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void psihat_table(const double* x, std::size_t n, int jmax, double* mant,
                  double* offs) {
#if defined(MINORS_HAVE_AVX2_TU)
  if (active_backend() == Backend::avx2) {
    psihat_table_avx2(x, n, jmax, mant, offs);
    return;
  }
#endif
  psihat_table_scalar(x, n, jmax, mant, offs);
}

}  // namespace minors::simd
