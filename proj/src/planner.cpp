#include "torsion/planner.hpp"

#include <cmath>
#include <stdexcept>

#include "torsion/constants.hpp"

namespace torsion {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be > 0");
}

constexpr double casimir_validity_separation = 4e-4;  // cm (4 um)

}  // namespace

void WireSpec::validate() const {
  require_positive(radius, "wire radius");
  require_positive(length, "wire length");
  require_positive(internal_viscosity, "internal_viscosity");
  require_positive(torsion_modulus, "torsion_modulus");
}

WireProperties wire_properties(const WireSpec& wire) {
  wire.validate();
  const double r2 = wire.radius * wire.radius;
  const double geometry = pi * r2 * r2 / (2.0 * wire.length);
  return {wire.internal_viscosity * geometry,
          wire.torsion_modulus * geometry};
}

double crossover_length(const WireSpec& wire, double damping_target) {
  wire.validate();
  require_positive(damping_target, "damping_target");
  const double r2 = wire.radius * wire.radius;
  return wire.internal_viscosity * pi * r2 * r2 / (2.0 * damping_target);
}

double electronic_angle_noise(double voltage_noise_density,
                              double angle_sensitivity) {
  require_positive(voltage_noise_density, "voltage_noise_density");
  require_positive(angle_sensitivity, "angle_sensitivity");
  return voltage_noise_density / angle_sensitivity;
}

CasimirForce casimir_thermal_force(double curvature_radius, double separation,
                                   double temperature,
                                   CasimirReduction reduction) {
  require_positive(curvature_radius, "curvature_radius");
  require_positive(separation, "separation");
  require_positive(temperature, "temperature");
  const double scale =
      reduction == CasimirReduction::DielectricHalved ? 0.5 : 1.0;
  CasimirForce out;
  out.force = scale * 2.4 * curvature_radius * k_boltzmann * temperature /
              (4.0 * separation * separation);
  out.below_validity_range = separation < casimir_validity_separation;
  return out;
}

void MeasurementPlan::validate() const {
  wire.validate();
  pendulum.validate();
  require_positive(arm_radius, "arm_radius");
  require_positive(curvature_radius, "curvature_radius");
  require_positive(separation, "separation");
  require_positive(temperature, "temperature");
  require_positive(averaging_time, "averaging_time");
  if (!(target_accuracy > 0) || !(target_accuracy < 1))
    throw std::invalid_argument("target_accuracy must be in (0, 1)");
  if (!(excess_noise_factor >= 1))
    throw std::invalid_argument("excess_noise_factor must be >= 1");
  if (std::abs(temperature - pendulum.temperature) >
      1e-9 * temperature)
    throw std::invalid_argument(
        "plan temperature must match pendulum.temperature");
  const bool has_v = voltage_noise_density > 0;
  const bool has_s = angle_sensitivity > 0;
  if (has_v != has_s)
    throw std::invalid_argument(
        "voltage_noise_density and angle_sensitivity must be given together");
}

FeasibilityReport feasibility_report(const MeasurementPlan& plan) {
  plan.validate();
  FeasibilityReport rep;

  const WireProperties wp = wire_properties(plan.wire);
  const CasimirForce cf = casimir_thermal_force(
      plan.curvature_radius, plan.separation, plan.temperature,
      plan.reduction);
  rep.casimir_force = cf.force;
  rep.casimir_below_validity = cf.below_validity_range;
  rep.target_force_noise = plan.target_accuracy * cf.force;

  const double kT = k_boltzmann * plan.temperature;
  const double gamma = plan.pendulum.damping;
  const double arm2 = plan.arm_radius * plan.arm_radius;
  rep.thermal_force_noise =
      std::sqrt(2.0 * gamma * kT / (arm2 * plan.averaging_time));

  auto& entries = rep.budget.entries;
  entries.push_back({"wire intrinsic damping gamma_W", wp.damping,
                     "dyne cm s", false});
  entries.push_back({"wire stiffness alpha", wp.stiffness, "dyne cm/rad",
                     false});
  // length at which the wire's own damping reaches the operating damping;
  // longer wires buy nothing thermally but add tilt sensitivity
  entries.push_back({"crossover length at operating gamma",
                     crossover_length(plan.wire, plan.pendulum.damping),
                     "cm", false});
  entries.push_back({"thermal Casimir force", cf.force, "dyne", false});
  entries.push_back(
      {"target force noise", rep.target_force_noise, "dyne", false});
  entries.push_back(
      {"thermal force noise", rep.thermal_force_noise, "dyne", true});

  if (plan.excess_noise_factor > 1.0) {
    const double f = plan.excess_noise_factor;
    // chosen so the quadrature total is exactly factor * thermal
    entries.push_back({"excess (tilt) force noise",
                       rep.thermal_force_noise * std::sqrt(f * f - 1.0),
                       "dyne", true});
  }
  if (plan.voltage_noise_density > 0) {
    const double angle_floor = electronic_angle_noise(
        plan.voltage_noise_density, plan.angle_sensitivity);
    entries.push_back(
        {"electronic angle noise", angle_floor, "rad/sqrt(Hz)", false});
    // equivalent force noise of the averaged readout: boxcar over T has a
    // 1/(2T) noise bandwidth
    const double force_floor =
        plan.pendulum.stiffness * angle_floor /
        (plan.arm_radius * std::sqrt(2.0 * plan.averaging_time));
    entries.push_back(
        {"electronic force noise", force_floor, "dyne", true});
  }

  double sum_sq = 0;
  for (const auto& e : entries)
    if (e.in_total) sum_sq += e.value * e.value;
  rep.budget.total_force_noise = std::sqrt(sum_sq);
  rep.effective_force_noise = rep.budget.total_force_noise;

  const double target2 = rep.target_force_noise * rep.target_force_noise;
  rep.required_averaging_time = 2.0 * gamma * kT / (arm2 * target2);
  rep.effective_required_averaging_time =
      plan.averaging_time *
      (rep.effective_force_noise / rep.target_force_noise) *
      (rep.effective_force_noise / rep.target_force_noise);
  rep.margin = rep.target_force_noise / rep.effective_force_noise;
  rep.achievable = rep.margin >= 1.0;
  return rep;
}

}  // namespace torsion
