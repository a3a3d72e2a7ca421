#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torsion/pendulum.hpp"

namespace torsion {

enum class Channel { Angle, AngularVelocity, IntegratorTorque };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

// Uniformly sampled simulated record. Angle in rad, AngularVelocity in
// rad/s, IntegratorTorque in dyne cm. Identical (seed, params, dt, length)
// reproduce bit-identical values.
struct TimeSeries {
  double dt = 0;  // s
  Channel channel = Channel::Angle;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;  // digest of the generating configuration
  std::vector<double> values;

  void validate() const;
};

enum class StepperKind { ExactGaussian, EulerMaruyama };

struct SimConfig {
  PendulumParams pendulum;
  std::optional<FeedbackParams> feedback;
  bool include_inertia = false;  // feedback mode only
  double dt = 0;                 // s
  std::int64_t n_steps = 0;
  // Discarded before recording; defaults to 10 relaxation times (10*2Q/omega0).
  std::optional<std::int64_t> n_burnin;
  std::uint64_t seed = 0;
  StepperKind stepper = StepperKind::ExactGaussian;

  // Test hooks, part of the public surface: disable the thermal drive, apply
  // a constant external torque (dyne cm), start from a nonzero angle.
  bool noise_enabled = true;
  double external_torque = 0;
  double initial_angle = 0;

  void validate() const;  // stability guard dt * omega0(_fb) < 0.1, etc.
  std::int64_t burnin_steps() const;

  // Canonical key = value items describing this run (includes the RNG
  // algorithm tag) and their FNV-1a digest.
  std::vector<std::pair<std::string, std::string>> canonical_items() const;
  std::uint64_t fingerprint() const;
};

struct FreeSimResult {
  TimeSeries angle;
  TimeSeries angular_velocity;
};

struct FeedbackSimResult {
  TimeSeries angle;
  TimeSeries integrator_torque;  // kappa * integral(theta dt)
  std::string warning;           // non-empty when model assumptions degrade
};

// Second-order Langevin dynamics I th'' + gamma th' + alpha th = tau(t),
// with white torque noise of one-sided density 4 k T gamma. The default
// stepper propagates the linear system exactly over each dt with the exact
// per-step noise covariance, so the stationary statistics carry no
// discretization bias; Euler-Maruyama is available as a cross-check.
FreeSimResult simulate_free(const SimConfig& cfg);

// PI-locked loop gamma th' + alpha th = tau(t) - beta th - kappa Int(theta).
// The inertial term is dropped by default; include_inertia restores it.
FeedbackSimResult simulate_feedback(const SimConfig& cfg);

}  // namespace torsion
