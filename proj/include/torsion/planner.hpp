#pragma once

#include <string>
#include <vector>

#include "torsion/pendulum.hpp"

namespace torsion {

// Torsion fiber described by geometry and material constants. Defaults are
// the tungsten values: internal viscosity 9.37e9 poise, torsion modulus
// 1.8e12 dyne/cm^2.
struct WireSpec {
  double radius = 0;                     // cm
  double length = 0;                     // cm
  double internal_viscosity = 9.37e9;    // poise
  double torsion_modulus = 1.8e12;       // dyne/cm^2

  void validate() const;
};

struct WireProperties {
  double damping = 0;    // gamma_W = eta pi r^4 / (2 l), dyne cm s
  double stiffness = 0;  // alpha = Z pi r^4 / (2 l), dyne cm / rad
};

WireProperties wire_properties(const WireSpec& wire);

// Wire length at which the intrinsic damping equals damping_target:
// l = eta pi r^4 / (2 gamma).
double crossover_length(const WireSpec& wire, double damping_target);

// Damping-regime reference points from two published torsion-balance
// setups: the operating damping, the wire's intrinsic damping, and the wire
// length at which the two become equal. Literature values, not recomputed.
struct DampingReference {
  const char* label;
  double experiment_damping;    // dyne cm s
  double wire_damping;          // gamma_W, dyne cm s
  double crossover_length_cm;   // cm
};

inline constexpr DampingReference damping_regime_presets[] = {
    {"magnetically damped balance", 10.0, 4.7e-2, 0.4},
    {"gas damped balance", 0.2, 1.8e-4, 2.4},
};

// Angle-noise floor of the readout, rad/sqrt(Hz).
double electronic_angle_noise(double voltage_noise_density,
                              double angle_sensitivity);

enum class CasimirReduction { PerfectConductor, DielectricHalved };

struct CasimirForce {
  double force = 0;                  // dyne
  bool below_validity_range = false; // set when separation < 4 um
};

// Thermal Casimir force between curved conductors:
// F = reduction * 2.4 R k T / (4 d^2), valid for separations above 4 um;
// smaller separations set the warning flag.
CasimirForce casimir_thermal_force(
    double curvature_radius, double separation, double temperature,
    CasimirReduction reduction = CasimirReduction::PerfectConductor);

struct BudgetEntry {
  std::string label;
  double value = 0;
  std::string unit;
  bool in_total = false;  // noise entries combine in quadrature
};

struct NoiseBudget {
  std::vector<BudgetEntry> entries;
  double total_force_noise = 0;  // quadrature over dyne noise entries
};

struct MeasurementPlan {
  WireSpec wire;
  PendulumParams pendulum;      // operating parameters (damping may exceed
                                // the wire's intrinsic gamma_W)
  double arm_radius = 0;        // cm
  double curvature_radius = 0;  // cm
  double separation = 0;        // cm
  double temperature = 0;       // K, must match pendulum.temperature
  double target_accuracy = 0;   // fractional, in (0, 1)
  double averaging_time = 0;    // s
  CasimirReduction reduction = CasimirReduction::PerfectConductor;
  // Multiplies the thermal noise to model tilt and other unbudgeted drives;
  // 100 reproduces the measured excess of the tilt-limited setup.
  double excess_noise_factor = 1.0;
  // Optional readout description; both zero omits the electronic entry.
  double voltage_noise_density = 0;  // V/sqrt(Hz)
  double angle_sensitivity = 0;      // V/rad

  void validate() const;
};

struct FeasibilityReport {
  NoiseBudget budget;
  double casimir_force = 0;          // dyne
  double target_force_noise = 0;     // accuracy * force, dyne
  double thermal_force_noise = 0;    // at averaging_time, dyne
  double effective_force_noise = 0;  // quadrature total at averaging_time
  double required_averaging_time = 0;           // thermal only, s
  double effective_required_averaging_time = 0; // all noise entries, s
  double margin = 0;                 // target / effective noise
  bool achievable = false;           // margin >= 1
  bool casimir_below_validity = false;
};

FeasibilityReport feasibility_report(const MeasurementPlan& plan);

}  // namespace torsion
