/* ---------------------------------------------------------------------------
 * quadrature.hpp -- Gauss-Legendre rules and the kernel restriction grids.
 * ------------------------------------------------------------------------- */
#pragma once

#include <vector>

namespace minors {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre polynomial (standard gauleg construction).  order >= 1.
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

struct QuadratureGrid {
  double lower = 0.0;   // left endpoint t (scaled coordinates)
  double length = 0.0;  // truncation length L
  int order = 0;        // node count m
  std::vector<double> nodes;    // strictly increasing, in [lower, lower+length]
  std::vector<double> weights;  // positive, sum to length
};

// Gauss-Legendre rule mapped affinely to [t, t+length].
// Preconditions: length > 0, order >= 4 (throws std::invalid_argument),
// order <= 512 (configuration error; larger rules are never needed here).
QuadratureGrid build_grid(double t, double length, int order);

// Default truncation length for a restriction starting at scaled coordinate
// t.  The integrand decays like e^{-(4/3) y^{3/2}} to the right, so 12 units
// past max(t, -2) makes the dropped tail < 1e-14.
inline double default_truncation_length(double t) {
  return t >= -2.0 ? 12.0 : 10.0 - t;
}

}  // namespace minors
