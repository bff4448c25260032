#pragma once

#include <array>
#include <string_view>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"
#include "motobs/kinematics/rotation.hpp"

namespace motobs {

enum class Body { kRearBody, kFrontBody, kFrontWheel, kRearWheel };

inline constexpr std::array<Body, 4> kAllBodies = {
    Body::kRearBody, Body::kFrontBody, Body::kFrontWheel, Body::kRearWheel};

std::string_view body_name(Body b);

struct Pose {
  Vector3 r = Vector3::Zero();
  Rotation R = Rotation::Identity();
};

/// Kinematic state of one body in the inertial frame.
///
/// Velocities are linear in v: `v_world == Jv * v` and `w_world == Jw * v`.
/// The residual accelerations complete the exact decomposition
/// `a = Jv * vdot + a_res`, `gamma = Jw * vdot + g_res`.
struct BodyKinematics {
  Body body = Body::kRearBody;
  Vector3 r_world = Vector3::Zero();
  Rotation R_world = Rotation::Identity();
  Vector3 v_world = Vector3::Zero();
  Vector3 w_world = Vector3::Zero();
  Matrix3x7 Jv = Matrix3x7::Zero();
  Matrix3x7 Jw = Matrix3x7::Zero();
  Vector3 a_res = Vector3::Zero();
  Vector3 g_res = Vector3::Zero();
};

/// COM position and orientation of a body relative to V, in V coordinates.
/// Only roll and steer enter.
template <typename S>
void pose_in_vehicle_frame(Body body, const S& phi, const S& delta,
                           const ParameterSet& p, Vec3<S>& r, Mat3<S>& R) {
  const Mat3<S> R_phi = rot_x(phi);
  switch (body) {
    case Body::kRearBody:
      r = R_phi * Vec3<S>(S(0.0), S(0.0), S(p.h));
      R = R_phi;
      return;
    case Body::kRearWheel:
      r = R_phi * Vec3<S>(S(-p.l_r), S(0.0), S(p.R_r));
      R = R_phi;
      return;
    case Body::kFrontBody:
    case Body::kFrontWheel: {
      const Mat3<S> R_phi_eps = R_phi * rot_y(S(p.eps)).eval();
      const Mat3<S> R_delta = rot_z(delta);
      const Vec3<S> offset = body == Body::kFrontBody
                                 ? Vec3<S>(S(p.e), S(0.0), S(p.f))
                                 : Vec3<S>(S(p.c), S(0.0), S(-p.s));
      r = R_phi_eps * (Vec3<S>(S(p.a), S(0.0), S(0.0)) + R_delta * offset);
      R = R_phi_eps * R_delta;
      return;
    }
  }
}

/// Inertial-frame pose: r_O = [x, y, 0] + R_OV r_V and R_O = R_OV R_V.
template <typename S>
void pose_in_world_frame(Body body, const S& x, const S& y, const S& psi,
                         const S& phi, const S& delta, const ParameterSet& p,
                         Vec3<S>& r, Mat3<S>& R) {
  Vec3<S> r_V;
  Mat3<S> R_V;
  pose_in_vehicle_frame(body, phi, delta, p, r_V, R_V);
  const Mat3<S> R_OV = rot_z(psi);
  r = Vec3<S>(x, y, S(0.0)) + R_OV * r_V;
  R = R_OV * R_V;
}

Pose body_pose_V(Body body, const Vector7& q, const ParameterSet& p);
Pose body_pose_world(Body body, const Vector7& q, const ParameterSet& p);

/// True for the two wheels; their local spin is [0, dtheta, 0].
bool is_wheel(Body body);

BodyKinematics body_kinematics(Body body, const Vector7& q, const Vector7& v,
                               const ParameterSet& p);

std::array<BodyKinematics, 4> all_body_kinematics(const Vector7& q, const Vector7& v,
                                                  const ParameterSet& p);

}  // namespace motobs
