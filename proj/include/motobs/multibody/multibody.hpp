#pragma once

#include <array>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"
#include "motobs/kinematics/kinematics.hpp"

namespace motobs {

/// Force and moment on a body, inertial frame.
struct Wrench {
  Vector3 force = Vector3::Zero();
  Vector3 moment = Vector3::Zero();
};

using BodyWrenches = std::array<Wrench, 4>;  // indexed like kAllBodies

/// Inertia tensor rotated into the inertial frame, R J R^T.
Matrix3 world_inertia(Body body, const Vector7& q, const ParameterSet& p);
Matrix3 body_inertia(Body body, const ParameterSet& p);
double body_mass(Body body, const ParameterSet& p);

/// Vehicle-frame planar velocity: (vx, vy) rotated through -psi.
struct PlanarVelocity {
  double vx = 0.0;
  double vy = 0.0;
};
PlanarVelocity vehicle_frame_velocity(const Vector7& q, const Vector7& v);

/// Signed aerodynamic drag along the vehicle x axis (opposes motion).
double drag_force(double vx_vehicle, const ParameterSet& p);

/// Gravity, drag, tire forces and input torques on each body.
BodyWrenches applied_wrenches(const Vector7& q, const Vector7& v,
                              const TireForceState& tires, const InputVector& u,
                              const ParameterSet& p);

Matrix7 mass_matrix(const Vector7& q, const ParameterSet& p);
Vector7 applied_efforts(const Vector7& q, const Vector7& v, const TireForceState& tires,
                        const InputVector& u, const ParameterSet& p);
Vector7 residual_efforts(const Vector7& q, const Vector7& v, const ParameterSet& p);

/// Generalized mass matrix and effort vectors from one kinematics pass.
struct JourdainTerms {
  Matrix7 M = Matrix7::Zero();
  Vector7 Q_a = Vector7::Zero();
  Vector7 Q_r = Vector7::Zero();
  double raw_asymmetry = 0.0;  // max |M - M^T| before symmetrization
};

JourdainTerms assemble(const Vector7& q, const Vector7& v, const TireForceState& tires,
                       const InputVector& u, const ParameterSet& p);

/// Solves M vdot = Q_a - Q_r.
Vector7 solve_generalized_accel(const Matrix7& M, const Vector7& rhs);

Vector7 generalized_accel(const Vector7& q, const Vector7& v, const TireForceState& tires,
                          const InputVector& u, const ParameterSet& p);

/// Kinetic energy 0.5 v^T M v.
double kinetic_energy(const Vector7& q, const Vector7& v, const ParameterSet& p);

}  // namespace motobs
