/* ---------------------------------------------------------------------------
 * format_detail.hpp -- shortest round-trip decimal formatting shared by the
 * CSV writers.  Internal to the library sources.
 * ------------------------------------------------------------------------- */
#pragma once

#include <cstdio>
#include <string>

namespace minors {
namespace detail {

// shortest decimal form that scans back to the same double, '.' separator
inline std::string fmt_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int prec = 1; prec <= 16; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof cand, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(cand, "%lf", &back);
    if (back == v) return std::string(cand);
  }
  return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace detail
}  // namespace minors
