#include "motobs/multibody/multibody.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "motobs/error.hpp"

namespace motobs {

namespace {

constexpr double kMaxCondition = 1e12;

std::size_t index_of(Body b) {
  for (std::size_t i = 0; i < kAllBodies.size(); ++i) {
    if (kAllBodies[i] == b) return i;
  }
  return 0;
}

}  // namespace

double body_mass(Body body, const ParameterSet& p) {
  switch (body) {
    case Body::kRearBody: return p.m_Gr;
    case Body::kFrontBody: return p.m_Gf;
    case Body::kFrontWheel: return p.m_Rf;
    case Body::kRearWheel: return p.m_Rr;
  }
  return 0.0;
}

Matrix3 body_inertia(Body body, const ParameterSet& p) {
  switch (body) {
    case Body::kRearBody: return p.J_Gr;
    case Body::kFrontBody: return p.J_Gf;
    case Body::kFrontWheel: return p.J_Rf;
    case Body::kRearWheel: return p.J_Rr;
  }
  return Matrix3::Zero();
}

Matrix3 world_inertia(Body body, const Vector7& q, const ParameterSet& p) {
  const Rotation R = body_pose_world(body, q, p).R;
  return R * body_inertia(body, p) * R.transpose();
}

PlanarVelocity vehicle_frame_velocity(const Vector7& q, const Vector7& v) {
  const double c = std::cos(q(gi::psi)), s = std::sin(q(gi::psi));
  return {c * v(gi::x) + s * v(gi::y), -s * v(gi::x) + c * v(gi::y)};
}

double drag_force(double vx_vehicle, const ParameterSet& p) {
  return -0.5 * p.rho_air * p.C_d * p.A_v * vx_vehicle * std::abs(vx_vehicle);
}

BodyWrenches applied_wrenches(const Vector7& q, const Vector7& v,
                              const TireForceState& tires, const InputVector& u,
                              const ParameterSet& p) {
  const Rotation R_OV = rot_z(q(gi::psi));
  const Rotation R_phi = rot_x(q(gi::phi));
  const Rotation R_delta = rot_z(q(gi::delta));
  const PlanarVelocity vV = vehicle_frame_velocity(q, v);

  auto gravity = [&](Body b) { return Vector3(0.0, 0.0, -body_mass(b, p) * p.g); };
  const Vector3 F_front(tires.Ffx, tires.Ffy, tires.Ffz);
  const Vector3 F_rear(tires.Frx, tires.Fry, tires.Frz);

  BodyWrenches w;

  Wrench& rear_body = w[index_of(Body::kRearBody)];
  rear_body.force =
      R_OV * (gravity(Body::kRearBody) + Vector3(drag_force(vV.vx, p), 0.0, 0.0));

  Wrench& rear_wheel = w[index_of(Body::kRearWheel)];
  rear_wheel.force = R_OV * (gravity(Body::kRearWheel) + F_rear);
  const Vector3 rear_arm = R_phi * Vector3(0.0, 0.0, -p.R_r);
  rear_wheel.moment = R_OV * (Vector3(0.0, u(ui::tau_D) + u(ui::tau_Br), 0.0) +
                              rear_arm.cross(F_rear));

  Wrench& front_body = w[index_of(Body::kFrontBody)];
  front_body.force = R_OV * gravity(Body::kFrontBody);
  front_body.moment =
      R_OV * Vector3(0.0, 0.0, u(ui::tau) - p.K_delta * v(gi::delta));

  Wrench& front_wheel = w[index_of(Body::kFrontWheel)];
  front_wheel.force = R_OV * (gravity(Body::kFrontWheel) + F_front);
  Rotation arm_frame = R_phi * R_delta;
  if (p.options.front_arm_caster) arm_frame = R_phi * rot_y(p.eps) * R_delta;
  const Vector3 front_arm = arm_frame * Vector3(0.0, 0.0, -p.R_f);
  front_wheel.moment =
      R_OV * (Vector3(0.0, u(ui::tau_Bf), 0.0) + front_arm.cross(F_front));

  return w;
}

JourdainTerms assemble(const Vector7& q, const Vector7& v, const TireForceState& tires,
                       const InputVector& u, const ParameterSet& p) {
  const auto kin = all_body_kinematics(q, v, p);
  const BodyWrenches wrenches = applied_wrenches(q, v, tires, u, p);
  JourdainTerms t;
  for (std::size_t i = 0; i < kAllBodies.size(); ++i) {
    const BodyKinematics& k = kin[i];
    const double m = body_mass(k.body, p);
    const Matrix3 J = k.R_world * body_inertia(k.body, p) * k.R_world.transpose();
    t.M.noalias() += m * k.Jv.transpose() * k.Jv;
    t.M.noalias() += k.Jw.transpose() * J * k.Jw;
    t.Q_a.noalias() += k.Jv.transpose() * wrenches[i].force;
    t.Q_a.noalias() += k.Jw.transpose() * wrenches[i].moment;
    const Vector3 gyro = J * k.g_res + k.w_world.cross(J * k.w_world);
    t.Q_r.noalias() += m * k.Jv.transpose() * k.a_res;
    t.Q_r.noalias() += k.Jw.transpose() * gyro;
  }
  t.raw_asymmetry = (t.M - t.M.transpose()).cwiseAbs().maxCoeff();
  t.M = 0.5 * (t.M + t.M.transpose()).eval();
  return t;
}

Matrix7 mass_matrix(const Vector7& q, const ParameterSet& p) {
  return assemble(q, Vector7::Zero(), TireForceState{}, InputVector::Zero(), p).M;
}

Vector7 applied_efforts(const Vector7& q, const Vector7& v, const TireForceState& tires,
                        const InputVector& u, const ParameterSet& p) {
  return assemble(q, v, tires, u, p).Q_a;
}

Vector7 residual_efforts(const Vector7& q, const Vector7& v, const ParameterSet& p) {
  return assemble(q, v, TireForceState{}, InputVector::Zero(), p).Q_r;
}

Vector7 solve_generalized_accel(const Matrix7& M, const Vector7& rhs) {
  const Eigen::LDLT<Matrix7> ldlt(M);
  // LDLT quietly pseudo-inverts zero pivots, so the pivot spread is checked
  // alongside the condition estimate.
  const auto pivots = ldlt.vectorD().cwiseAbs();
  const double spread = pivots.minCoeff() / pivots.maxCoeff();
  const double rcond =
      ldlt.info() == Eigen::Success ? std::min(ldlt.rcond(), spread) : 0.0;
  if (!(rcond * kMaxCondition > 1.0)) {
    std::ostringstream msg;
    msg << "degenerate configuration: mass matrix condition estimate "
        << (rcond > 0.0 ? 1.0 / rcond : INFINITY) << " exceeds " << kMaxCondition;
    throw DegenerateConfiguration(msg.str());
  }
  return ldlt.solve(rhs);
}

Vector7 generalized_accel(const Vector7& q, const Vector7& v, const TireForceState& tires,
                          const InputVector& u, const ParameterSet& p) {
  const JourdainTerms t = assemble(q, v, tires, u, p);
  return solve_generalized_accel(t.M, t.Q_a - t.Q_r);
}

double kinetic_energy(const Vector7& q, const Vector7& v, const ParameterSet& p) {
  return 0.5 * v.dot(mass_matrix(q, p) * v);
}

}  // namespace motobs
