#include "motobs/tire/tire.hpp"

#include <algorithm>
#include <cmath>

#include "motobs/error.hpp"
#include "motobs/multibody/multibody.hpp"

namespace motobs {

StaticLoads static_loads(const ParameterSet& p) {
  const double weight = total_mass(p) * p.g;
  const double wheelbase = p.l_r + p.l_f;
  StaticLoads loads{weight * (p.l_r + p.l_m) / wheelbase,
                    weight * (p.l_f - p.l_m) / wheelbase};
  if (!(loads.front > 0.0 && loads.rear > 0.0)) {
    throw ConfigError("static loads must be positive; check l_f, l_r, l_m and g");
  }
  return loads;
}

SlipState slip_state(const Vector7& q, const Vector7& v, const WheelSpeeds& wheels,
                     const ParameterSet& p) {
  const PlanarVelocity vV = vehicle_frame_velocity(q, v);
  SlipState s;
  s.low_speed = std::abs(vV.vx) < kSlipSpeedFloor;
  const double denom = std::max(std::abs(vV.vx), kSlipSpeedFloor);
  s.kappa_f = (p.R_f * wheels.front - vV.vx) / denom;
  s.kappa_r = (p.R_r * wheels.rear - vV.vx) / denom;
  const double dpsi = v(gi::psi);
  s.alpha_f = q(gi::delta) * std::cos(p.eps) - std::atan((vV.vy + p.l_f * dpsi) / denom);
  s.alpha_r = -std::atan((vV.vy - p.l_r * dpsi) / denom);
  s.gamma_f = q(gi::phi) + q(gi::delta) * std::sin(p.eps);
  s.gamma_r = q(gi::phi);
  return s;
}

double magic_formula(double B, double C, double D, double E, double mu) {
  const double Bmu = B * mu;
  return D * std::sin(C * std::atan(Bmu - E * (Bmu - std::atan(Bmu))));
}

double magic_formula(const MagicFormulaChannel& ch, double normal_load, double mu) {
  return magic_formula(ch.B, ch.C, ch.D * normal_load, ch.E, mu);
}

SteadyForces steady_state_forces(const SlipState& slips, const StaticLoads& loads,
                                 const ParameterSet& p) {
  const TireCoefficients& tf = p.tire_front;
  const TireCoefficients& tr = p.tire_rear;
  SteadyForces F;
  F.Ffx0 = magic_formula(tf.longitudinal, loads.front, slips.kappa_f);
  F.Frx0 = magic_formula(tr.longitudinal, loads.rear, slips.kappa_r);
  // Camber thrust acts toward the lean side, -y for positive roll.
  F.Ffy0 = magic_formula(tf.side_slip, loads.front, slips.alpha_f) -
           magic_formula(tf.camber, loads.front, slips.gamma_f);
  F.Fry0 = magic_formula(tr.side_slip, loads.rear, slips.alpha_r) -
           magic_formula(tr.camber, loads.rear, slips.gamma_r);
  return F;
}

Vector4 relaxation_rhs(const Vector4& F, const SteadyForces& F0, double vx_vehicle,
                       double vy_vehicle, const ParameterSet& p) {
  const double speed = std::abs(vx_vehicle);
  const double lateral_speed =
      p.options.lateral_relaxation == LateralRelaxationSpeed::kLateral ? vy_vehicle : speed;
  Vector4 dF;
  dF(0) = speed / p.sigma_fx * (F0.Ffx0 - F(0));
  dF(1) = speed / p.sigma_rx * (F0.Frx0 - F(1));
  dF(2) = lateral_speed / p.sigma_fy * (F0.Ffy0 - F(2));
  dF(3) = lateral_speed / p.sigma_ry * (F0.Fry0 - F(3));
  return dF;
}

}  // namespace motobs
