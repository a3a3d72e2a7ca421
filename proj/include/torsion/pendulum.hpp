#pragma once

#include <complex>
#include <vector>

namespace torsion {

// Physical description of a torsion pendulum, CGS units throughout.
struct PendulumParams {
  double inertia = 0;      // I, g cm^2
  double damping = 0;      // gamma, dyne cm s (torque per unit angular velocity)
  double stiffness = 0;    // alpha, dyne cm / rad
  double temperature = 0;  // T, K

  void validate() const;  // throws std::invalid_argument on non-positive fields
};

enum class DampingRegime { Underdamped, Critical, Overdamped };

// Quantities derived from PendulumParams. For Q <= 1/2 the oscillation ratio
// field carries sqrt(1/(4Q^2) - 1), the growth rate of the hyperbolic branch,
// instead of the ring frequency ratio sqrt(1 - 1/(4Q^2)).
struct DerivedQuantities {
  double omega0 = 0;        // rad/s, omega0^2 = alpha/I
  double quality = 0;       // Q = alpha/(omega0 gamma)
  double omega_ratio = 0;   // |1 - 1/(4Q^2)|^(1/2), interpretation per regime
  double period = 0;        // tau0 = 2 pi / omega0, s
  double damping_time = 0;  // tau_d = 2Q/omega0 = 2I/gamma, s (1/e amplitude)
  DampingRegime regime = DampingRegime::Underdamped;
};

DerivedQuantities derive(const PendulumParams& params);

// PI loop gains: restoring torque -beta*theta - kappa*integral(theta dt).
struct FeedbackParams {
  double proportional_gain = 0;  // beta, dyne cm / rad
  double integral_gain = 0;      // kappa, dyne cm / (rad s)

  void validate() const;  // beta >= 0, kappa > 0
};

struct FeedbackDerived {
  double omega0 = 0;       // omega0_fb^2 = kappa/gamma
  double quality = 0;      // Q_fb = kappa/(omega0_fb (alpha + beta))
  double omega_ratio = 0;  // same convention as DerivedQuantities
  double period = 0;       // 2 pi / omega0_fb
  DampingRegime regime = DampingRegime::Underdamped;
};

FeedbackDerived derive_feedback(const PendulumParams& params,
                                const FeedbackParams& fb);

enum class SpectrumKind { AngleDensity, ForceDensity };

// One-sided spectral density samples, per Hz. AngleDensity in rad^2/Hz,
// ForceDensity in dyne^2/Hz.
struct NoiseSpectrum {
  SpectrumKind kind = SpectrumKind::AngleDensity;
  std::vector<double> frequency;  // Hz, strictly increasing, >= 0
  std::vector<double> value;      // >= 0, same length as frequency

  void validate() const;
};

// sqrt(kT/alpha): equipartition RMS angle of the torsion mode.
double equipartition_angle_rms(const PendulumParams& params);

// Ratio of torsion-mode to swing-mode RMS thermal angle noise,
// sqrt(m g l / alpha) with standard gravity.
double swing_to_torsion_ratio(const PendulumParams& params, double mass,
                              double pendulum_length);

// One-sided angle noise density of the free pendulum at frequency f (Hz):
// (4 k T gamma / alpha^2) / ((1-x^2)^2 + x^2/Q^2), x = 2 pi f / omega0.
double free_angle_psd(const PendulumParams& params, double f_hz);

// Angle autocorrelation of the free pendulum at lag t >= 0, rad^2.
// R(0) = kT/alpha exactly; continuous across critical damping.
double free_angle_autocorr(const PendulumParams& params, double t);

// Four-factor pole factorization of the response denominator, valid for
// Q > 1/2. Returns the real part of the complex product, which equals
// (1-x^2)^2 + x^2/Q^2.
double factored_denominator(double x, double quality);
std::complex<double> factored_denominator_product(double x, double quality);

// Variance of the sample mean of the angle over a window of length
// t_measure: (2/T) Int_0^T (1 - t/T) R(t) dt, by adaptive quadrature.
double sample_mean_variance(const PendulumParams& params, double t_measure);

// RMS angle noise after averaging for t_measure,
// sqrt(4kT/(I tau_d T)) (tau0/2pi)^2.
double free_rms_angle_noise(const PendulumParams& params, double t_measure);

// RMS force noise after averaging for t_measure with lever arm arm_radius:
// sqrt(2 gamma k T / (R^2 T)). Independent of alpha and I.
double free_rms_force_noise(const PendulumParams& params, double arm_radius,
                            double t_measure);

// Closed-loop angle noise density, rad^2/Hz. Zero at f = 0: the loop pins
// the angle at DC.
double feedback_angle_psd(const PendulumParams& params,
                          const FeedbackParams& fb, double f_hz);

// Force noise density as measured at the integrator output, dyne^2/Hz:
// (4 k T gamma / R^2) / ((1-x^2)^2 + x^2/Q_fb^2), x = 2 pi f / omega0_fb.
double feedback_force_psd(const PendulumParams& params,
                          const FeedbackParams& fb, double arm_radius,
                          double f_hz);

// Autocorrelation of the integrator-output force at lag t >= 0, dyne^2.
double feedback_force_autocorr(const PendulumParams& params,
                               const FeedbackParams& fb, double arm_radius,
                               double t);

// RMS force noise of the locked loop after averaging for t_measure. Equals
// the free-pendulum value for the same gamma, arm and window. Requires
// t_measure * omega0_fb * min(Q_fb, 1) > 100, else throws: the closed form
// assumes the window is long compared to the loop correlation time.
double feedback_rms_force_noise(const PendulumParams& params,
                                const FeedbackParams& fb, double arm_radius,
                                double t_measure);

// Shared decay envelope e^(-u/2Q) [cos(W u) + sin(W u)/(2QW)] with the
// hyperbolic branch for Q < 1/2 and a series branch at critical damping.
// free_angle_autocorr(t) = (kT/alpha) * decay_envelope(omega0 t, Q).
double decay_envelope(double u, double quality);

}  // namespace torsion
