#include "torsion/langevin.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "torsion/config.hpp"
#include "torsion/constants.hpp"
#include "torsion/linalg.hpp"
#include "torsion/rng.hpp"

namespace torsion {

using linalg::Mat;
using linalg::Vec;

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::Angle:
      return "Angle";
    case Channel::AngularVelocity:
      return "AngularVelocity";
    case Channel::IntegratorTorque:
      return "IntegratorTorque";
  }
  return "?";
}

Channel channel_from_name(const std::string& name) {
  if (name == "Angle") return Channel::Angle;
  if (name == "AngularVelocity") return Channel::AngularVelocity;
  if (name == "IntegratorTorque") return Channel::IntegratorTorque;
  throw std::invalid_argument("unknown channel '" + name + "'");
}

void TimeSeries::validate() const {
  if (!(dt > 0)) throw std::invalid_argument("TimeSeries: dt must be > 0");
  if (values.empty()) throw std::invalid_argument("TimeSeries: empty");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("TimeSeries: non-finite sample");
}

namespace {

double loop_omega0(const SimConfig& cfg) {
  if (cfg.feedback)
    return std::sqrt(cfg.feedback->integral_gain / cfg.pendulum.damping);
  return std::sqrt(cfg.pendulum.stiffness / cfg.pendulum.inertia);
}

double loop_quality(const SimConfig& cfg) {
  const double w0 = loop_omega0(cfg);
  if (cfg.feedback)
    return cfg.feedback->integral_gain /
           (w0 * (cfg.pendulum.stiffness + cfg.feedback->proportional_gain));
  return cfg.pendulum.stiffness / (w0 * cfg.pendulum.damping);
}

}  // namespace

void SimConfig::validate() const {
  pendulum.validate();
  if (feedback) feedback->validate();
  if (include_inertia && !feedback)
    throw std::invalid_argument("include_inertia applies to feedback mode");
  if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (n_burnin && *n_burnin < 0)
    throw std::invalid_argument("n_burnin must be >= 0");
  const double w0 = loop_omega0(*this);
  if (!(dt * w0 < 0.1)) {
    std::ostringstream msg;
    msg << "dt too large for stability: dt * omega0 = " << dt * w0
        << " (need < 0.1)";
    throw std::invalid_argument(msg.str());
  }
  if (feedback && include_inertia) {
    // with inertia restored the loop is only stable for
    // gamma (alpha + beta) > I kappa
    const double lhs = pendulum.damping *
                       (pendulum.stiffness + feedback->proportional_gain);
    const double rhs = pendulum.inertia * feedback->integral_gain;
    if (!(lhs > rhs))
      throw std::invalid_argument(
          "feedback loop unstable with inertia: need "
          "gamma*(alpha+beta) > I*kappa");
  }
  if (!std::isfinite(external_torque) || !std::isfinite(initial_angle))
    throw std::invalid_argument("non-finite test-hook value");
}

std::int64_t SimConfig::burnin_steps() const {
  if (n_burnin) return *n_burnin;
  const double relaxation = 2.0 * loop_quality(*this) / loop_omega0(*this);
  return static_cast<std::int64_t>(std::ceil(10.0 * relaxation / dt));
}

std::vector<std::pair<std::string, std::string>> SimConfig::canonical_items()
    const {
  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("pendulum.inertia", format_double(pendulum.inertia));
  items.emplace_back("pendulum.damping", format_double(pendulum.damping));
  items.emplace_back("pendulum.stiffness", format_double(pendulum.stiffness));
  items.emplace_back("pendulum.temperature",
                     format_double(pendulum.temperature));
  items.emplace_back("sim.mode", feedback ? "feedback" : "free");
  if (feedback) {
    items.emplace_back("feedback.proportional_gain",
                       format_double(feedback->proportional_gain));
    items.emplace_back("feedback.integral_gain",
                       format_double(feedback->integral_gain));
    items.emplace_back("sim.include_inertia",
                       include_inertia ? "true" : "false");
  }
  items.emplace_back("sim.dt", format_double(dt));
  items.emplace_back("sim.n_steps", std::to_string(n_steps));
  items.emplace_back("sim.n_burnin", std::to_string(burnin_steps()));
  items.emplace_back("sim.seed", std::to_string(seed));
  items.emplace_back("sim.stepper", stepper == StepperKind::ExactGaussian
                                        ? "exact"
                                        : "euler");
  items.emplace_back("sim.noise", noise_enabled ? "true" : "false");
  items.emplace_back("sim.external_torque", format_double(external_torque));
  items.emplace_back("sim.initial_angle", format_double(initial_angle));
  items.emplace_back("sim.rng", Rng::algorithm_tag);
  return items;
}

std::uint64_t SimConfig::fingerprint() const {
  std::ostringstream text;
  text << "torsion-sim-v1\n";
  for (const auto& [k, v] : canonical_items()) text << k << " = " << v << "\n";
  return fnv1a64(text.str());
}

namespace {

// dX = (A X + u) dt + b dW, dim 2 or 3, driven in a single component.
struct LinearSde {
  Mat drift;              // A
  Vec forcing{};          // u, constant external drive
  Vec noise{};            // b
  Mat stationary_cov;     // P solving A P + P A^T + b b^T = 0
};

LinearSde free_system(const SimConfig& cfg) {
  const auto& p = cfg.pendulum;
  const double kT = k_boltzmann * p.temperature;
  LinearSde sys;
  sys.drift.n = 2;
  sys.drift(0, 0) = 0.0;
  sys.drift(0, 1) = 1.0;
  sys.drift(1, 0) = -p.stiffness / p.inertia;
  sys.drift(1, 1) = -p.damping / p.inertia;
  sys.forcing = {0.0, cfg.external_torque / p.inertia, 0.0};
  sys.noise = {0.0, std::sqrt(2.0 * p.damping * kT) / p.inertia, 0.0};
  sys.stationary_cov.n = 2;
  sys.stationary_cov(0, 0) = kT / p.stiffness;
  sys.stationary_cov(1, 1) = kT / p.inertia;
  return sys;
}

// State (theta, q) with q = Int theta dt; inertial term dropped.
LinearSde feedback_system(const SimConfig& cfg) {
  const auto& p = cfg.pendulum;
  const auto& fb = *cfg.feedback;
  const double kT = k_boltzmann * p.temperature;
  const double total_stiffness = p.stiffness + fb.proportional_gain;
  LinearSde sys;
  sys.drift.n = 2;
  sys.drift(0, 0) = -total_stiffness / p.damping;
  sys.drift(0, 1) = -fb.integral_gain / p.damping;
  sys.drift(1, 0) = 1.0;
  sys.drift(1, 1) = 0.0;
  sys.forcing = {cfg.external_torque / p.damping, 0.0, 0.0};
  sys.noise = {std::sqrt(2.0 * kT / p.damping), 0.0, 0.0};
  sys.stationary_cov.n = 2;
  sys.stationary_cov(0, 0) = kT / total_stiffness;
  sys.stationary_cov(1, 1) =
      p.damping * kT / (fb.integral_gain * total_stiffness);
  return sys;
}

// State (theta, theta', q), full loop equation with inertia.
LinearSde feedback_system_inertia(const SimConfig& cfg) {
  const auto& p = cfg.pendulum;
  const auto& fb = *cfg.feedback;
  const double kT = k_boltzmann * p.temperature;
  const double total_stiffness = p.stiffness + fb.proportional_gain;
  LinearSde sys;
  sys.drift.n = 3;
  sys.drift(0, 1) = 1.0;
  sys.drift(1, 0) = -total_stiffness / p.inertia;
  sys.drift(1, 1) = -p.damping / p.inertia;
  sys.drift(1, 2) = -fb.integral_gain / p.inertia;
  sys.drift(2, 0) = 1.0;
  sys.forcing = {0.0, cfg.external_torque / p.inertia, 0.0};
  sys.noise = {0.0, std::sqrt(2.0 * p.damping * kT) / p.inertia, 0.0};

  // stationary covariance of the damped loop; the margin
  // gamma(alpha+beta) - I kappa > 0 is the validated stability condition
  const double margin =
      p.damping * total_stiffness - p.inertia * fb.integral_gain;
  const double var_theta = p.damping * kT / margin;
  sys.stationary_cov.n = 3;
  sys.stationary_cov(0, 0) = var_theta;
  sys.stationary_cov(1, 1) = total_stiffness / p.inertia * var_theta;
  sys.stationary_cov(2, 2) = p.damping / fb.integral_gain * var_theta;
  sys.stationary_cov(1, 2) = -var_theta;
  sys.stationary_cov(2, 1) = -var_theta;
  return sys;
}

struct Stepper {
  int n = 0;
  bool exact = false;
  double dt = 0;
  Mat propagator;    // exact: expm(A dt); euler: I + A dt
  Vec forced{};      // exact: A^-1 (F - I) u; euler: u dt
  Mat noise_chol;    // exact: chol(P - F P F^T); euler: b sqrt(dt) (column)
  Vec euler_noise{};

  void step(Vec& state, Rng& rng, bool noise_on) const {
    Vec next = linalg::apply(propagator, state);
    for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] += forced[static_cast<std::size_t>(i)];
    if (noise_on) {
      if (exact) {
        double z[3];
        for (int i = 0; i < n; ++i) z[i] = rng.normal();
        for (int i = 0; i < n; ++i) {
          double s = 0;
          for (int j = 0; j <= i; ++j) s += noise_chol(i, j) * z[j];
          next[static_cast<std::size_t>(i)] += s;
        }
      } else {
        const double z = rng.normal();
        for (int i = 0; i < n; ++i)
          next[static_cast<std::size_t>(i)] += euler_noise[static_cast<std::size_t>(i)] * z;
      }
    }
    state = next;
  }
};

Stepper make_stepper(const LinearSde& sys, double dt, StepperKind kind) {
  Stepper st;
  st.n = sys.drift.n;
  st.dt = dt;
  st.exact = (kind == StepperKind::ExactGaussian);
  if (st.exact) {
    st.propagator = linalg::expm(linalg::scale(sys.drift, dt));
    // exact per-step noise covariance from stationarity:
    // P = F P F^T + Sigma_dt
    const Mat fpft = linalg::multiply(
        linalg::multiply(st.propagator, sys.stationary_cov),
        linalg::transpose(st.propagator));
    st.noise_chol =
        linalg::cholesky_psd(linalg::subtract(sys.stationary_cov, fpft));
    // response to the constant drive: A^-1 (F - I) u
    Vec rhs = linalg::apply(
        linalg::subtract(st.propagator, linalg::identity(st.n)), sys.forcing);
    bool has_drive = false;
    for (double v : rhs) has_drive |= (v != 0.0);
    st.forced = has_drive ? linalg::solve(sys.drift, rhs) : Vec{};
  } else {
    st.propagator = linalg::add(linalg::identity(st.n),
                                linalg::scale(sys.drift, dt));
    for (int i = 0; i < st.n; ++i) {
      st.forced[static_cast<std::size_t>(i)] = sys.forcing[static_cast<std::size_t>(i)] * dt;
      st.euler_noise[static_cast<std::size_t>(i)] =
          sys.noise[static_cast<std::size_t>(i)] * std::sqrt(dt);
    }
  }
  return st;
}

TimeSeries make_series(const SimConfig& cfg, Channel channel) {
  TimeSeries ts;
  ts.dt = cfg.dt;
  ts.channel = channel;
  ts.seed = cfg.seed;
  ts.fingerprint = cfg.fingerprint();
  ts.values.reserve(static_cast<std::size_t>(cfg.n_steps));
  return ts;
}

void check_finite(double v) {
  if (!std::isfinite(v))
    throw std::runtime_error("simulation produced a non-finite sample");
}

}  // namespace

FreeSimResult simulate_free(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.feedback)
    throw std::invalid_argument("simulate_free: config has feedback gains");
  const LinearSde sys = free_system(cfg);
  const Stepper st = make_stepper(sys, cfg.dt, cfg.stepper);
  Rng rng(cfg.seed);
  Vec state = {cfg.initial_angle, 0.0, 0.0};
  for (std::int64_t i = 0, burn = cfg.burnin_steps(); i < burn; ++i)
    st.step(state, rng, cfg.noise_enabled);

  FreeSimResult out{make_series(cfg, Channel::Angle),
                    make_series(cfg, Channel::AngularVelocity)};
  for (std::int64_t i = 0; i < cfg.n_steps; ++i) {
    check_finite(state[0]);
    out.angle.values.push_back(state[0]);
    out.angular_velocity.values.push_back(state[1]);
    st.step(state, rng, cfg.noise_enabled);
  }
  return out;
}

FeedbackSimResult simulate_feedback(const SimConfig& cfg) {
  cfg.validate();
  if (!cfg.feedback)
    throw std::invalid_argument("simulate_feedback: feedback gains missing");
  const LinearSde sys =
      cfg.include_inertia ? feedback_system_inertia(cfg) : feedback_system(cfg);
  const Stepper st = make_stepper(sys, cfg.dt, cfg.stepper);
  const double kappa = cfg.feedback->integral_gain;
  const int q_index = cfg.include_inertia ? 2 : 1;

  Rng rng(cfg.seed);
  Vec state = {cfg.initial_angle, 0.0, 0.0};
  for (std::int64_t i = 0, burn = cfg.burnin_steps(); i < burn; ++i)
    st.step(state, rng, cfg.noise_enabled);

  FeedbackSimResult out{make_series(cfg, Channel::Angle),
                        make_series(cfg, Channel::IntegratorTorque),
                        {}};
  if (cfg.include_inertia) {
    const double w0 = loop_omega0(cfg);
    const double ratio = cfg.pendulum.inertia * w0 / cfg.pendulum.damping;
    if (ratio > 0.1) {
      std::ostringstream msg;
      msg << "large-damping assumption degraded: I*omega0_fb/gamma = "
          << ratio;
      out.warning = msg.str();
    }
  }
  for (std::int64_t i = 0; i < cfg.n_steps; ++i) {
    check_finite(state[0]);
    out.angle.values.push_back(state[0]);
    out.integrator_torque.values.push_back(
        kappa * state[static_cast<std::size_t>(q_index)]);
    st.step(state, rng, cfg.noise_enabled);
  }
  return out;
}

}  // namespace torsion
