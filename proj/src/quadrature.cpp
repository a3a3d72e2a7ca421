#include "torsion/quadrature.hpp"

#include <algorithm>

#include "torsion/constants.hpp"

namespace torsion::quad {

std::vector<double> envelope_breakpoints(double u_end, double quality) {
  if (!(u_end > 0)) return {0.0, 1.0};
  std::vector<double> pts;
  pts.push_back(0.0);
  const double q = quality;
  if (q > 0.5) {
    const double ratio2 = 1.0 - 1.0 / (4.0 * q * q);
    const double omega = std::sqrt(std::max(ratio2, 1e-12));
    // quarter oscillation period per panel
    const double step = std::min(0.5 * pi / omega, u_end);
    for (double u = step; u < u_end; u += step) pts.push_back(u);
  } else {
    // fast pole sets the initial scale, panels grow geometrically toward
    // the slow tail
    const double ratio = std::sqrt(std::max(1.0 / (4.0 * q * q) - 1.0, 0.0));
    const double fast = 1.0 / (2.0 * q) + ratio;
    double step = 0.4 / fast;
    const double slow = std::max(1.0 / (2.0 * q) - ratio, 1e-12);
    const double step_max = 0.5 / slow;
    for (double u = step; u < u_end; u += step) {
      pts.push_back(u);
      step = std::min(step * 1.6, step_max);
    }
  }
  pts.push_back(u_end);
  return pts;
}

}  // namespace torsion::quad
