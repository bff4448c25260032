#pragma once

#include <Eigen/Dense>

namespace motobs {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector4 = Eigen::Matrix<double, 4, 1>;
using Vector7 = Eigen::Matrix<double, 7, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;
using Vector14 = Eigen::Matrix<double, 14, 1>;
using Matrix14 = Eigen::Matrix<double, 14, 14>;
using Matrix3x7 = Eigen::Matrix<double, 3, 7>;

/// Generalized coordinate / velocity slots.
namespace gi {
inline constexpr int x = 0;
inline constexpr int y = 1;
inline constexpr int psi = 2;
inline constexpr int phi = 3;
inline constexpr int delta = 4;
inline constexpr int theta_f = 5;
inline constexpr int theta_r = 6;
}  // namespace gi

/// Extended state slots: [psi, phi, delta, v(7), Ffx, Frx, Ffy, Fry].
namespace xi {
inline constexpr int psi = 0;
inline constexpr int phi = 1;
inline constexpr int delta = 2;
inline constexpr int vx = 3;
inline constexpr int vy = 4;
inline constexpr int dpsi = 5;
inline constexpr int dphi = 6;
inline constexpr int ddelta = 7;
inline constexpr int dtheta_f = 8;
inline constexpr int dtheta_r = 9;
inline constexpr int Ffx = 10;
inline constexpr int Frx = 11;
inline constexpr int Ffy = 12;
inline constexpr int Fry = 13;
inline constexpr int velocity_begin = 3;
inline constexpr int force_begin = 10;
}  // namespace xi

/// Input slots: steering torque, drive torque, front and rear brake torques.
namespace ui {
inline constexpr int tau = 0;
inline constexpr int tau_D = 1;
inline constexpr int tau_Bf = 2;
inline constexpr int tau_Br = 3;
}  // namespace ui

using ExtendedState = Vector14;
using InputVector = Vector4;

struct GeneralizedState {
  Vector7 q = Vector7::Zero();  // [x, y, psi, phi, delta, theta_f, theta_r]
  Vector7 v = Vector7::Zero();  // [vx, vy, dpsi, dphi, ddelta, dtheta_f, dtheta_r]
};

/// Instantaneous longitudinal/lateral tire forces (vehicle frame) and the
/// static vertical loads.
struct TireForceState {
  double Ffx = 0.0;
  double Frx = 0.0;
  double Ffy = 0.0;
  double Fry = 0.0;
  double Ffz = 0.0;
  double Frz = 0.0;
};

/// Builds q and v from an extended state. Planar position and wheel angles
/// are set to zero; the dynamics do not depend on them.
inline GeneralizedState generalized_from_extended(const ExtendedState& X) {
  GeneralizedState s;
  s.q(gi::psi) = X(xi::psi);
  s.q(gi::phi) = X(xi::phi);
  s.q(gi::delta) = X(xi::delta);
  s.v = X.segment<7>(xi::velocity_begin);
  return s;
}

}  // namespace motobs
