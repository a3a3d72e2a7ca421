#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace torsion::quad {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double gk_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double gauss_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int max_depth = 28;
};

namespace detail {

template <class F>
std::pair<double, double> kronrod_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = gk_weights[7] * fc;
  double gauss = gauss_weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk_nodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    kronrod += gk_weights[i] * fsum;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

template <class F>
double adaptive(F& f, double a, double b, double tol, int depth,
                int max_depth) {
  auto [whole, err] = kronrod_panel(f, a, b);
  if (err <= tol || depth >= max_depth) return whole;
  const double c = 0.5 * (a + b);
  return adaptive(f, a, c, 0.5 * tol, depth + 1, max_depth) +
         adaptive(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, Options opt = {}) {
  if (!(b >= a)) throw std::invalid_argument("integrate: requires b >= a");
  if (a == b) return 0.0;
  auto [coarse, err] = detail::kronrod_panel(f, a, b);
  const double tol =
      std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(coarse), 1e-300));
  if (err <= tol) return coarse;
  return detail::adaptive(f, a, b, tol, 0, opt.max_depth);
}

// Integrates over consecutive panels defined by breakpoints; each panel is
// refined adaptively. Intended for oscillatory or multi-scale integrands
// where the caller knows the structure.
template <class F>
double integrate_panels(F&& f, std::span<const double> breakpoints,
                        Options opt = {}) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("integrate_panels: need at least 2 points");
  double total = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a))
      throw std::invalid_argument("integrate_panels: breakpoints not sorted");
    auto [coarse, err] = detail::kronrod_panel(f, a, b);
    double tol = std::max(opt.abs_tol,
                          opt.rel_tol * std::max(std::abs(coarse), 1e-300));
    total += (err <= tol) ? coarse
                          : detail::adaptive(f, a, b, tol, 0, opt.max_depth);
  }
  return total;
}

// Breakpoints 0 = u_0 < ... < u_n = u_end for integrands of the form
// e^(-u/2Q) * (trig or hyperbolic in u). Panels resolve the oscillation
// (quarter period) for Q > 1/2 and the fast pole for Q < 1/2.
std::vector<double> envelope_breakpoints(double u_end, double quality);

}  // namespace torsion::quad
