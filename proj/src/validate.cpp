#include "torsion/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torsion/constants.hpp"
#include "torsion/quadrature.hpp"
#include "torsion/rng.hpp"

namespace torsion {

namespace {

// Panel breakpoints in x = omega/omega0 for the response-shaped densities:
// fine near the resonance, geometric growth into the x^-4 tail, and never
// coarser than a third of the cosine period when a transform is requested.
std::vector<double> psd_breakpoints(double quality, double x_cut,
                                    double phase_rate) {
  const double osc =
      phase_rate > 0 ? 2.0 * pi / (3.0 * phase_rate) : 1e300;
  const double res_width = 1.0 / (4.0 * quality);
  auto step_at = [&](double x) {
    double s = std::min(0.25, osc);
    if (x < 3.0) s = std::min(s, 0.1);
    if (x > 1.0 - 8.0 * res_width && x < 1.0 + 8.0 * res_width)
      s = std::min(s, 0.5 * res_width);
    return s;
  };
  std::vector<double> pts{0.0};
  double x = 0;
  while (x < 3.0) {
    x = std::min(3.0, x + step_at(x));
    pts.push_back(x);
  }
  double step = step_at(3.0);
  while (x < x_cut) {
    step = std::min({step * 1.4, osc, 20.0});
    x = std::min(x_cut, x + step);
    pts.push_back(x);
  }
  return pts;
}

template <class Density>
double integrate_density(Density&& s_of_f, double omega0, double quality,
                         double t, double x_cut) {
  const auto pts_x = psd_breakpoints(quality, x_cut, omega0 * t);
  std::vector<double> pts_f(pts_x.size());
  const double x_to_f = omega0 / (2.0 * pi);
  for (std::size_t i = 0; i < pts_x.size(); ++i) pts_f[i] = pts_x[i] * x_to_f;
  const double two_pi_t = 2.0 * pi * t;
  // absolute floor ~1e-9 of the full integral, split across panels, so
  // near-cancelling oscillatory panels do not recurse to max depth
  const double scale = s_of_f(0.0) * x_to_f * 0.5 * pi * quality;
  const double abs_tol =
      1e-9 * scale / static_cast<double>(pts_f.size() - 1);
  return quad::integrate_panels(
      [&](double f) {
        const double s = s_of_f(f);
        return t > 0 ? s * std::cos(two_pi_t * f) : s;
      },
      pts_f, {.rel_tol = 1e-10, .abs_tol = abs_tol});
}

}  // namespace

double free_angle_psd_total(const PendulumParams& params) {
  const DerivedQuantities d = derive(params);
  auto density = [&](double f) { return free_angle_psd(params, f); };
  const double x_cut = 300.0;
  const double f_cut = x_cut * d.omega0 / (2.0 * pi);
  // x^-4 tail beyond the cutoff
  return integrate_density(density, d.omega0, d.quality, 0.0, x_cut) +
         density(f_cut) * f_cut / 3.0;
}

double feedback_force_psd_total(const PendulumParams& params,
                                const FeedbackParams& fb, double arm_radius) {
  const FeedbackDerived d = derive_feedback(params, fb);
  auto density = [&](double f) {
    return feedback_force_psd(params, fb, arm_radius, f);
  };
  const double x_cut = 300.0;
  const double f_cut = x_cut * d.omega0 / (2.0 * pi);
  return integrate_density(density, d.omega0, d.quality, 0.0, x_cut) +
         density(f_cut) * f_cut / 3.0;
}

double free_angle_autocorr_numeric(const PendulumParams& params, double t) {
  const DerivedQuantities d = derive(params);
  auto density = [&](double f) { return free_angle_psd(params, f); };
  return integrate_density(density, d.omega0, d.quality, t, 200.0);
}

double feedback_force_autocorr_numeric(const PendulumParams& params,
                                       const FeedbackParams& fb,
                                       double arm_radius, double t) {
  const FeedbackDerived d = derive_feedback(params, fb);
  auto density = [&](double f) {
    return feedback_force_psd(params, fb, arm_radius, f);
  };
  return integrate_density(density, d.omega0, d.quality, t, 200.0);
}

namespace {

PendulumParams params_with_quality(double quality) {
  // omega0 = 1 rad/s, alpha = 1 dyne cm/rad, so gamma = 1/Q
  return {1.0, 1.0 / quality, 1.0, 300.0};
}

FeedbackParams feedback_with_quality(const PendulumParams& p,
                                     double quality) {
  // kappa = gamma gives omega0_fb = 1 rad/s; beta sets the quality
  FeedbackParams fb;
  fb.integral_gain = p.damping;
  const double total_stiffness = fb.integral_gain / quality;
  if (total_stiffness < p.stiffness)
    throw std::invalid_argument("feedback_with_quality: beta would be < 0");
  fb.proportional_gain = total_stiffness - p.stiffness;
  return fb;
}

IdentityCheck make_check(const std::string& name, double residual,
                         double tolerance) {
  return {name, residual, tolerance, residual <= tolerance};
}

}  // namespace

std::vector<IdentityCheck> run_identity_suite(std::uint64_t rng_seed,
                                              bool inject_fault) {
  std::vector<IdentityCheck> checks;
  const double fault = inject_fault ? 1.001 : 1.0;

  // closure of the angle spectrum against equipartition
  for (double q : {0.6, 2.0, 10.0, 100.0}) {
    const PendulumParams p = params_with_quality(q);
    const double expected = k_boltzmann * p.temperature / p.stiffness;
    const double total = free_angle_psd_total(p) * fault;
    std::ostringstream name;
    name << "equipartition-closure-Q" << q;
    checks.push_back(
        make_check(name.str(), std::abs(total / expected - 1.0), 1e-6));
  }

  // pole factorization against the direct denominator
  {
    Rng rng(rng_seed);
    double worst_real = 0, worst_imag = 0;
    for (int i = 0; i < 1000; ++i) {
      const double x = 10.0 * rng.uniform();
      const double q = 0.5 + 99.5 * rng.uniform() + 1e-9;
      const double direct =
          (1 - x * x) * (1 - x * x) + x * x / (q * q);
      const auto product = factored_denominator_product(x, q);
      worst_real = std::max(worst_real,
                            std::abs(product.real() - direct) / direct);
      worst_imag =
          std::max(worst_imag, std::abs(product.imag()) / direct);
    }
    checks.push_back(
        make_check("pole-factorization-real", worst_real, 1e-12));
    checks.push_back(
        make_check("pole-factorization-imag", worst_imag, 1e-12));
  }

  // four expressions for the quality factor
  {
    double worst = 0;
    for (const PendulumParams& p :
         {PendulumParams{1.0, 0.1, 1.0, 300.0},
          PendulumParams{250.0, 10.0, 1.1, 300.0},
          PendulumParams{3.7e2, 2e-3, 0.61, 77.0}}) {
      const DerivedQuantities d = derive(p);
      const double forms[4] = {
          pi * d.damping_time / d.period, d.omega0 * d.damping_time / 2.0,
          p.inertia * d.omega0 / p.damping,
          p.stiffness / (d.omega0 * p.damping)};
      for (double f : forms)
        worst = std::max(worst, std::abs(f / forms[3] - 1.0));
    }
    checks.push_back(make_check("quality-identity-chain", worst, 1e-12));
  }

  // numeric Wiener-Khinchin inversion against the closed forms
  {
    double worst_free = 0, worst_fb = 0;
    const double arm = 10.0;
    for (double q : {0.6, 2.0, 10.0}) {
      const PendulumParams p = params_with_quality(q);
      const DerivedQuantities d = derive(p);
      const double r0 = k_boltzmann * p.temperature / p.stiffness;
      const PendulumParams pf{1.0, 10.0, 1.0, 300.0};
      const FeedbackParams fb = feedback_with_quality(pf, q);
      const double rf0 = feedback_force_autocorr(pf, fb, arm, 0.0);
      for (int i = 0; i <= 20; ++i) {
        const double t = 10.0 * d.period * i / 20.0;
        worst_free = std::max(
            worst_free, std::abs(free_angle_autocorr_numeric(p, t) -
                                 free_angle_autocorr(p, t)) /
                            r0);
        worst_fb = std::max(
            worst_fb,
            std::abs(feedback_force_autocorr_numeric(pf, fb, arm, t) -
                     feedback_force_autocorr(pf, fb, arm, t)) /
                rf0);
      }
    }
    checks.push_back(make_check("wiener-khinchin-free", worst_free, 1e-6));
    checks.push_back(
        make_check("wiener-khinchin-feedback-force", worst_fb, 1e-6));
  }

  // integral of the feedback force spectrum equals its lag-0 value
  {
    const PendulumParams p{1.0, 10.0, 1.0, 300.0};
    const FeedbackParams fb = feedback_with_quality(p, 0.5 + 1e-6);
    const double total = feedback_force_psd_total(p, fb, 10.0);
    const double lag0 = feedback_force_autocorr(p, fb, 10.0, 0.0);
    checks.push_back(make_check("feedback-psd-total-vs-lag0",
                                std::abs(total / lag0 - 1.0), 1e-6));
  }

  // autocorrelation continuous in Q across critical damping
  {
    double worst = 0;
    const double r0 = k_boltzmann * 300.0 / 1.0;
    for (double dq : {-1e-6, 1e-6}) {
      const double q = 0.5 + dq;
      const PendulumParams p = params_with_quality(q);
      const PendulumParams pc = params_with_quality(0.5);
      for (int i = 0; i <= 30; ++i) {
        const double t = 20.0 * i / 30.0;
        worst = std::max(worst, std::abs(free_angle_autocorr(p, t) -
                                         free_angle_autocorr(pc, t)) /
                                    r0);
      }
    }
    checks.push_back(
        make_check("critical-damping-continuity", worst, 1e-6));
  }

  // windowed-variance limits: short windows recover R(0), long windows the
  // 2kT/(alpha Q omega0 T) asymptote
  {
    const PendulumParams p = params_with_quality(10.0);
    const DerivedQuantities d = derive(p);
    const double r0 = k_boltzmann * p.temperature / p.stiffness;
    const double short_window = d.period * 1e-4;
    checks.push_back(make_check(
        "sample-mean-variance-short-window",
        std::abs(sample_mean_variance(p, short_window) / r0 - 1.0), 1e-3));
    const double long_window = 1e4 / (d.quality * d.omega0);
    const double asymptote =
        2.0 * r0 / (d.quality * d.omega0 * long_window);
    checks.push_back(make_check(
        "sample-mean-variance-asymptote",
        std::abs(sample_mean_variance(p, long_window) / asymptote - 1.0),
        0.05));
  }

  // free and locked force noise agree and ignore everything but gamma
  {
    const PendulumParams p{1.0, 10.0, 1.0, 300.0};
    const FeedbackParams fb = feedback_with_quality(p, 0.5);
    const double t_measure = 1000.0, arm = 10.0;
    const double free_noise = free_rms_force_noise(p, arm, t_measure);
    const double locked_noise =
        feedback_rms_force_noise(p, fb, arm, t_measure);
    checks.push_back(make_check(
        "force-noise-free-vs-feedback",
        std::abs(locked_noise / free_noise - 1.0), 1e-12));

    double worst = 0;
    for (double scale : {0.1, 3.0, 10.0}) {
      PendulumParams varied = p;
      varied.stiffness *= scale;
      varied.inertia *= scale * scale;
      worst = std::max(
          worst, std::abs(free_rms_force_noise(varied, arm, t_measure) /
                              free_noise -
                          1.0));
      FeedbackParams fb_varied = fb;
      fb_varied.proportional_gain = fb.proportional_gain * scale + 1.0;
      fb_varied.integral_gain *= scale;
      worst = std::max(
          worst,
          std::abs(feedback_rms_force_noise(p, fb_varied, arm, t_measure) /
                       free_noise -
                   1.0));
    }
    checks.push_back(
        make_check("force-noise-insensitivity", worst, 1e-12));
  }

  return checks;
}

}  // namespace torsion
