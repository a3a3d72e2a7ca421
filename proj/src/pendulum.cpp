#include "torsion/pendulum.hpp"

#include <cmath>
#include <stdexcept>

#include "torsion/constants.hpp"
#include "torsion/quadrature.hpp"

namespace torsion {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be > 0");
}

// Signed epsilon eps = 1 - 1/(4Q^2); the envelope switches branch on its
// sign and uses a series when |eps| is below this threshold.
constexpr double critical_band = 1e-10;

}  // namespace

void PendulumParams::validate() const {
  require_positive(inertia, "inertia");
  require_positive(damping, "damping");
  require_positive(stiffness, "stiffness");
  require_positive(temperature, "temperature");
}

void FeedbackParams::validate() const {
  if (!(proportional_gain >= 0) || !std::isfinite(proportional_gain))
    throw std::invalid_argument("proportional_gain must be >= 0");
  require_positive(integral_gain, "integral_gain");
}

void NoiseSpectrum::validate() const {
  if (frequency.size() != value.size())
    throw std::invalid_argument("NoiseSpectrum: length mismatch");
  if (frequency.empty()) throw std::invalid_argument("NoiseSpectrum: empty");
  double prev = -1.0;
  for (double f : frequency) {
    if (!(f >= 0) || !(f > prev))
      throw std::invalid_argument(
          "NoiseSpectrum: frequencies must be >= 0 and strictly increasing");
    prev = f;
  }
  for (double v : value)
    if (!(v >= 0))
      throw std::invalid_argument("NoiseSpectrum: negative density");
}

namespace {

DampingRegime regime_of(double q, double& omega_ratio) {
  const double eps = 1.0 - 1.0 / (4.0 * q * q);
  omega_ratio = std::sqrt(std::abs(eps));
  if (std::abs(eps) < critical_band) return DampingRegime::Critical;
  return eps > 0 ? DampingRegime::Underdamped : DampingRegime::Overdamped;
}

}  // namespace

DerivedQuantities derive(const PendulumParams& params) {
  params.validate();
  DerivedQuantities d;
  d.omega0 = std::sqrt(params.stiffness / params.inertia);
  d.quality = params.stiffness / (d.omega0 * params.damping);
  d.period = 2.0 * pi / d.omega0;
  d.damping_time = 2.0 * d.quality / d.omega0;
  d.regime = regime_of(d.quality, d.omega_ratio);
  return d;
}

FeedbackDerived derive_feedback(const PendulumParams& params,
                                const FeedbackParams& fb) {
  params.validate();
  fb.validate();
  FeedbackDerived d;
  d.omega0 = std::sqrt(fb.integral_gain / params.damping);
  d.quality = fb.integral_gain /
              (d.omega0 * (params.stiffness + fb.proportional_gain));
  d.period = 2.0 * pi / d.omega0;
  d.regime = regime_of(d.quality, d.omega_ratio);
  return d;
}

double equipartition_angle_rms(const PendulumParams& params) {
  params.validate();
  return std::sqrt(k_boltzmann * params.temperature / params.stiffness);
}

double swing_to_torsion_ratio(const PendulumParams& params, double mass,
                              double pendulum_length) {
  params.validate();
  require_positive(mass, "mass");
  require_positive(pendulum_length, "pendulum_length");
  return std::sqrt(mass * g_standard * pendulum_length / params.stiffness);
}

namespace {

double response_denominator(double x, double q) {
  const double one_minus_x2 = 1.0 - x * x;
  return one_minus_x2 * one_minus_x2 + x * x / (q * q);
}

}  // namespace

double free_angle_psd(const PendulumParams& params, double f_hz) {
  params.validate();
  if (!(f_hz >= 0)) throw std::invalid_argument("frequency must be >= 0");
  const DerivedQuantities d = derive(params);
  const double x = 2.0 * pi * f_hz / d.omega0;
  const double dc = 4.0 * k_boltzmann * params.temperature * params.damping /
                    (params.stiffness * params.stiffness);
  return dc / response_denominator(x, d.quality);
}

double decay_envelope(double u, double quality) {
  if (!(u >= 0)) throw std::invalid_argument("lag must be >= 0");
  const double q = quality;
  const double eps = 1.0 - 1.0 / (4.0 * q * q);
  const double decay = u / (2.0 * q);
  if (std::abs(eps) < critical_band) {
    // series in (W u)^2 = eps u^2, valid for both signs of eps; the decay
    // factor keeps u below ~100/critical_band^(1/2) in practice
    const double s = eps * u * u;
    const double cos_term = 1.0 - s / 2.0 + s * s / 24.0;
    const double sinc_term = u * (1.0 - s / 6.0 + s * s / 120.0);
    return std::exp(-decay) * (cos_term + sinc_term / (2.0 * q));
  }
  if (eps > 0) {
    const double w = std::sqrt(eps);
    return std::exp(-decay) *
           (std::cos(w * u) + std::sin(w * u) / (2.0 * q * w));
  }
  // overdamped: cos -> cosh, sin(Wu)/W -> sinh(W~u)/W~, written as a sum of
  // two decaying exponentials so large u cannot overflow cosh
  const double w = std::sqrt(-eps);
  const double coef = 1.0 / (2.0 * q * w);
  return 0.5 * ((1.0 + coef) * std::exp(-(1.0 / (2.0 * q) - w) * u) +
                (1.0 - coef) * std::exp(-(1.0 / (2.0 * q) + w) * u));
}

double free_angle_autocorr(const PendulumParams& params, double t) {
  params.validate();
  const DerivedQuantities d = derive(params);
  const double variance =
      k_boltzmann * params.temperature / params.stiffness;
  return variance * decay_envelope(d.omega0 * t, d.quality);
}

std::complex<double> factored_denominator_product(double x, double quality) {
  if (!(quality > 0.5))
    throw std::invalid_argument(
        "factored_denominator requires Q > 1/2 (real pole frequency)");
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  const double w = std::sqrt(1.0 - 1.0 / (4.0 * quality * quality));
  const double half_width = 0.5 / quality;
  const std::complex<double> up(0.0, half_width);
  return (x - w + up) * (x + w + up) * (x - w - up) * (x + w - up);
}

double factored_denominator(double x, double quality) {
  return factored_denominator_product(x, quality).real();
}

double sample_mean_variance(const PendulumParams& params, double t_measure) {
  params.validate();
  require_positive(t_measure, "t_measure");
  const DerivedQuantities d = derive(params);
  const double variance =
      k_boltzmann * params.temperature / params.stiffness;
  const double window_u = d.omega0 * t_measure;

  // integrate only out to where the envelope has died; beyond u_cut the
  // integrand is below ~1e-17 of R(0)
  const double q = d.quality;
  double slow_rate = 1.0 / (2.0 * q);
  if (q < 0.5)
    slow_rate -= std::sqrt(1.0 / (4.0 * q * q) - 1.0);
  const double u_cut = std::min(window_u, 40.0 / slow_rate);

  const auto pts = quad::envelope_breakpoints(u_cut, q);
  const double integral = quad::integrate_panels(
      [&](double u) {
        return (1.0 - u / window_u) * decay_envelope(u, q);
      },
      pts, {.rel_tol = 1e-10, .abs_tol = 1e-14 * u_cut});
  return 2.0 * variance * integral / window_u;
}

double free_rms_angle_noise(const PendulumParams& params, double t_measure) {
  params.validate();
  require_positive(t_measure, "t_measure");
  const DerivedQuantities d = derive(params);
  const double cycle = d.period / (2.0 * pi);
  return std::sqrt(4.0 * k_boltzmann * params.temperature /
                   (params.inertia * d.damping_time * t_measure)) *
         cycle * cycle;
}

double free_rms_force_noise(const PendulumParams& params, double arm_radius,
                            double t_measure) {
  params.validate();
  require_positive(arm_radius, "arm_radius");
  require_positive(t_measure, "t_measure");
  return std::sqrt(2.0 * params.damping * k_boltzmann * params.temperature /
                   (arm_radius * arm_radius * t_measure));
}

double feedback_angle_psd(const PendulumParams& params,
                          const FeedbackParams& fb, double f_hz) {
  const FeedbackDerived d = derive_feedback(params, fb);
  if (!(f_hz >= 0)) throw std::invalid_argument("frequency must be >= 0");
  const double omega = 2.0 * pi * f_hz;
  if (omega == 0) return 0.0;  // integral action pins the angle at DC
  const double x = omega / d.omega0;
  const double kappa = fb.integral_gain;
  return 4.0 * k_boltzmann * params.temperature * params.damping * omega *
         omega / (kappa * kappa * response_denominator(x, d.quality));
}

double feedback_force_psd(const PendulumParams& params,
                          const FeedbackParams& fb, double arm_radius,
                          double f_hz) {
  const FeedbackDerived d = derive_feedback(params, fb);
  require_positive(arm_radius, "arm_radius");
  if (!(f_hz >= 0)) throw std::invalid_argument("frequency must be >= 0");
  const double x = 2.0 * pi * f_hz / d.omega0;
  return 4.0 * k_boltzmann * params.temperature * params.damping /
         (arm_radius * arm_radius * response_denominator(x, d.quality));
}

double feedback_force_autocorr(const PendulumParams& params,
                               const FeedbackParams& fb, double arm_radius,
                               double t) {
  const FeedbackDerived d = derive_feedback(params, fb);
  require_positive(arm_radius, "arm_radius");
  const double scale = d.omega0 * params.damping * k_boltzmann *
                       params.temperature * d.quality /
                       (arm_radius * arm_radius);
  return scale * decay_envelope(d.omega0 * t, d.quality);
}

double feedback_rms_force_noise(const PendulumParams& params,
                                const FeedbackParams& fb, double arm_radius,
                                double t_measure) {
  const FeedbackDerived d = derive_feedback(params, fb);
  require_positive(arm_radius, "arm_radius");
  require_positive(t_measure, "t_measure");
  const double guard = t_measure * d.omega0 * std::min(d.quality, 1.0);
  if (!(guard > 100.0))
    throw std::invalid_argument(
        "t_measure too short: the closed form assumes the averaging window "
        "is long compared to the loop correlation time "
        "(need t_measure * omega0_fb * min(Q_fb, 1) > 100)");
  return std::sqrt(2.0 * params.damping * k_boltzmann * params.temperature /
                   (arm_radius * arm_radius * t_measure));
}

}  // namespace torsion
