#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torsion/pendulum.hpp"

namespace torsion {

// Numeric cross-checks of the closed forms. These integrate the spectral
// densities directly (adaptive quadrature with an x^-4 tail estimate), so
// they are independent of the closed-form autocorrelation expressions they
// are compared against.

// Int_0^inf free_angle_psd df; equals kT/alpha when everything is right.
double free_angle_psd_total(const PendulumParams& params);

// Int_0^inf feedback_force_psd df; equals the lag-0 force autocorrelation.
double feedback_force_psd_total(const PendulumParams& params,
                                const FeedbackParams& fb, double arm_radius);

// Cosine transform Int_0^inf S(f) cos(2 pi f t) df of the respective PSD.
double free_angle_autocorr_numeric(const PendulumParams& params, double t);
double feedback_force_autocorr_numeric(const PendulumParams& params,
                                       const FeedbackParams& fb,
                                       double arm_radius, double t);

struct IdentityCheck {
  std::string name;
  double residual = 0;   // dimensionless, relative to the named tolerance's scale
  double tolerance = 0;
  bool pass = false;
};

// Full closed-form identity suite: equipartition closure, pole
// factorization, quality-factor identity chain, Wiener-Khinchin
// consistency, critical-damping continuity, sample-mean-variance limits,
// and force-noise equivalence. inject_fault perturbs one comparison to
// exercise failure reporting.
std::vector<IdentityCheck> run_identity_suite(std::uint64_t rng_seed,
                                              bool inject_fault = false);

}  // namespace torsion
