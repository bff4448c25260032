#pragma once

#include <cmath>

#include <Eigen/Core>

#include "motobs/core/state.hpp"

namespace motobs {

template <typename S>
using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;

using Rotation = Matrix3;

/// Roll about x.
template <typename S>
Mat3<S> rot_x(const S& angle) {
  using std::cos;
  using std::sin;
  const S c = cos(angle), s = sin(angle);
  Mat3<S> R;
  R << S(1.0), S(0.0), S(0.0),
       S(0.0), c, -s,
       S(0.0), s, c;
  return R;
}

/// Caster-style rotation about y. The sign layout puts -sin in row 0,
/// column 2, so rot_y(eps) tilts the steering axis backward at the top.
template <typename S>
Mat3<S> rot_y(const S& angle) {
  using std::cos;
  using std::sin;
  const S c = cos(angle), s = sin(angle);
  Mat3<S> R;
  R << c, S(0.0), -s,
       S(0.0), S(1.0), S(0.0),
       s, S(0.0), c;
  return R;
}

/// Yaw or steer about z.
template <typename S>
Mat3<S> rot_z(const S& angle) {
  using std::cos;
  using std::sin;
  const S c = cos(angle), s = sin(angle);
  Mat3<S> R;
  R << c, -s, S(0.0),
       s, c, S(0.0),
       S(0.0), S(0.0), S(1.0);
  return R;
}

inline Matrix3 skew(const Vector3& w) {
  Matrix3 W;
  W << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return W;
}

/// (W32, W13, W21) of a skew-symmetric matrix. Throws std::invalid_argument
/// when ||W + W^T||_inf exceeds 1e-9.
Vector3 skew_to_vector(const Matrix3& W);

/// Axial vector of the skew-symmetric part of W, no checks.
inline Vector3 vee_skew_part(const Matrix3& W) {
  return Vector3(0.5 * (W(2, 1) - W(1, 2)), 0.5 * (W(0, 2) - W(2, 0)),
                 0.5 * (W(1, 0) - W(0, 1)));
}

/// ||R^T R - I||_inf < tol and |det R - 1| < tol.
bool is_rotation(const Matrix3& R, double tol = 1e-12);

}  // namespace motobs
