/* ---------------------------------------------------------------------------
 * quadrature.cpp -- Gauss-Legendre rules and restriction grids.
 *
 * Nodes are the roots of the Legendre polynomial P_m on (-1, 1), found by
 * Newton iteration from the Chebyshev-like initial guess; weights follow
 * from w_i = 2 / ((1 - x_i^2) P_m'(x_i)^2).  Standard gauleg construction.
 * ------------------------------------------------------------------------- */
#include "minors/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace minors {

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order >= 1");
  const int m = order;
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // initial guess for the i-th root (descending in x)
    double z = std::cos(3.14159265358979323846 * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // evaluate P_m(z) and P_m'(z) by the three-term recurrence
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[m - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[m - 1 - i] = weights[i];
  }
}

QuadratureGrid build_grid(double t, double length, int order) {
  if (!(length > 0.0))
    throw std::invalid_argument("build_grid: length must be positive");
  if (order < 4)
    throw std::invalid_argument("build_grid: order must be >= 4");
  if (order > 512)
    throw std::invalid_argument("build_grid: order > 512 is a configuration "
                                "error (rules that large are never needed)");
  QuadratureGrid g;
  g.lower = t;
  g.length = length;
  g.order = order;
  std::vector<double> xs, ws;
  gauss_legendre(order, xs, ws);
  g.nodes.resize(order);
  g.weights.resize(order);
  const double c = t + 0.5 * length;
  for (int i = 0; i < order; ++i) {
    g.nodes[i] = c + 0.5 * length * xs[i];
    g.weights[i] = 0.5 * length * ws[i];
  }
  return g;
}

}  // namespace minors
