#pragma once

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"

namespace motobs {

/// Forward-speed floor used in slip denominators, m/s.
inline constexpr double kSlipSpeedFloor = 0.5;

struct StaticLoads {
  double front = 0.0;  // F_fz, N
  double rear = 0.0;   // F_rz, N
};

struct SlipState {
  double kappa_f = 0.0, kappa_r = 0.0;
  double alpha_f = 0.0, alpha_r = 0.0;
  double gamma_f = 0.0, gamma_r = 0.0;
  /// Set when |vx^V| fell below kSlipSpeedFloor and the denominators were
  /// clamped.
  bool low_speed = false;
};

struct WheelSpeeds {
  double front = 0.0;  // dtheta_f, rad/s
  double rear = 0.0;   // dtheta_r, rad/s
};

/// Steady-state (magic formula) tire forces in the vehicle frame.
struct SteadyForces {
  double Ffx0 = 0.0, Frx0 = 0.0, Ffy0 = 0.0, Fry0 = 0.0;
};

/// Static load split between the axles. Throws ConfigError when either load
/// is not strictly positive.
StaticLoads static_loads(const ParameterSet& p);

/// Slip quantities from the generalized state. Only psi, phi, delta of q and
/// the velocity block are used.
SlipState slip_state(const Vector7& q, const Vector7& v, const WheelSpeeds& wheels,
                     const ParameterSet& p);

/// D sin(C atan(B mu - E (B mu - atan(B mu)))) with an absolute peak D.
double magic_formula(double B, double C, double D, double E, double mu);

/// Channel evaluation with the peak scaled by the normal load.
double magic_formula(const MagicFormulaChannel& ch, double normal_load, double mu);

SteadyForces steady_state_forces(const SlipState& slips, const StaticLoads& loads,
                                 const ParameterSet& p);

/// First-order relaxation of the instantaneous forces toward the steady
/// values. Input and output order: [Ffx, Frx, Ffy, Fry].
Vector4 relaxation_rhs(const Vector4& F, const SteadyForces& F0, double vx_vehicle,
                       double vy_vehicle, const ParameterSet& p);

}  // namespace motobs
