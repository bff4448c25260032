#include "motobs/kinematics/kinematics.hpp"

#include <stdexcept>

#include "motobs/kinematics/dual.hpp"

namespace motobs {

Vector3 skew_to_vector(const Matrix3& W) {
  const double asym = (W + W.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  if (!(asym < 1e-9)) {
    throw std::invalid_argument("skew_to_vector: matrix is not skew-symmetric");
  }
  return Vector3(W(2, 1), W(0, 2), W(1, 0));
}

bool is_rotation(const Matrix3& R, double tol) {
  const double ortho =
      (R.transpose() * R - Matrix3::Identity()).cwiseAbs().rowwise().sum().maxCoeff();
  return ortho < tol && std::abs(R.determinant() - 1.0) < tol;
}

std::string_view body_name(Body b) {
  switch (b) {
    case Body::kRearBody: return "G_r";
    case Body::kFrontBody: return "G_f";
    case Body::kFrontWheel: return "R_f";
    case Body::kRearWheel: return "R_r";
  }
  return "?";
}

bool is_wheel(Body body) {
  return body == Body::kFrontWheel || body == Body::kRearWheel;
}

Pose body_pose_V(Body body, const Vector7& q, const ParameterSet& p) {
  Pose out;
  pose_in_vehicle_frame(body, q(gi::phi), q(gi::delta), p, out.r, out.R);
  return out;
}

Pose body_pose_world(Body body, const Vector7& q, const ParameterSet& p) {
  Pose out;
  pose_in_world_frame(body, q(gi::x), q(gi::y), q(gi::psi), q(gi::phi), q(gi::delta),
                      p, out.r, out.R);
  return out;
}

namespace {

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

constexpr std::array<int, 3> kAngleSlots = {gi::psi, gi::phi, gi::delta};

int spin_slot(Body body) {
  return body == Body::kFrontWheel ? gi::theta_f : gi::theta_r;
}

}  // namespace

BodyKinematics body_kinematics(Body body, const Vector7& q, const Vector7& v,
                               const ParameterSet& p) {
  BodyKinematics k;
  k.body = body;

  // Partials with respect to the three angles, one dual pass each.
  for (int slot : kAngleSlots) {
    const D1 psi = seed(q(gi::psi), slot == gi::psi ? 1.0 : 0.0);
    const D1 phi = seed(q(gi::phi), slot == gi::phi ? 1.0 : 0.0);
    const D1 delta = seed(q(gi::delta), slot == gi::delta ? 1.0 : 0.0);
    Vec3<D1> r;
    Mat3<D1> R;
    pose_in_world_frame(body, D1(q(gi::x)), D1(q(gi::y)), psi, phi, delta, p, r, R);
    Matrix3 R0, dR;
    for (int i = 0; i < 3; ++i) {
      k.Jv(i, slot) = r(i).tangent;
      k.r_world(i) = r(i).value;
      for (int j = 0; j < 3; ++j) {
        R0(i, j) = R(i, j).value;
        dR(i, j) = R(i, j).tangent;
      }
    }
    k.R_world = R0;
    k.Jw.col(slot) = vee_skew_part(dR * R0.transpose());
  }
  k.Jv.col(gi::x) = Vector3::UnitX();
  k.Jv.col(gi::y) = Vector3::UnitY();
  if (is_wheel(body)) k.Jw.col(spin_slot(body)) = k.R_world.col(1);

  k.v_world = k.Jv * v;
  k.w_world = k.Jw * v;

  // Residual accelerations: second time derivative along q(t) = q + t v
  // with v held fixed. Planar translation is linear and drops out.
  {
    const D2 psi = seed2(q(gi::psi), v(gi::psi));
    const D2 phi = seed2(q(gi::phi), v(gi::phi));
    const D2 delta = seed2(q(gi::delta), v(gi::delta));
    Vec3<D2> r;
    Mat3<D2> R;
    pose_in_world_frame(body, D2(0.0), D2(0.0), psi, phi, delta, p, r, R);
    Matrix3 R0, dR, ddR;
    for (int i = 0; i < 3; ++i) {
      k.a_res(i) = r(i).tangent.tangent;
      for (int j = 0; j < 3; ++j) {
        R0(i, j) = R(i, j).value.value;
        dR(i, j) = R(i, j).value.tangent;
        ddR(i, j) = R(i, j).tangent.tangent;
      }
    }
    // d/dt (Rdot R^T) = Rddot R^T + Rdot Rdot^T; the second term is symmetric.
    k.g_res = vee_skew_part(ddR * R0.transpose());
    if (is_wheel(body)) k.g_res += dR.col(1) * v(spin_slot(body));
  }
  return k;
}

std::array<BodyKinematics, 4> all_body_kinematics(const Vector7& q, const Vector7& v,
                                                  const ParameterSet& p) {
  std::array<BodyKinematics, 4> out;
  for (std::size_t i = 0; i < kAllBodies.size(); ++i) {
    out[i] = body_kinematics(kAllBodies[i], q, v, p);
  }
  return out;
}

}  // namespace motobs
