#pragma once

#include <Eigen/Core>

#include "motobs/core/params.hpp"
#include "motobs/estimator/trim.hpp"

namespace motobs {

using Matrix14x4 = Eigen::Matrix<double, 14, 4>;
using Matrix4x14 = Eigen::Matrix<double, 4, 14>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;

struct LinearModel {
  Matrix14 A = Matrix14::Zero();
  Matrix14x4 B = Matrix14x4::Zero();
};

/// Central-difference Jacobians of h at the trim. Every column is recomputed
/// with half the step and must agree to 1e-4 relative, otherwise NumericError.
LinearModel linearize(const TrimPoint& tp, const ParameterSet& p);

/// Index sets of the two subsystems that decouple at a rectilinear trim.
inline constexpr int kLateralStates[] = {xi::psi, xi::phi, xi::delta, xi::vy, xi::dpsi,
                                         xi::dphi, xi::ddelta, xi::Ffy, xi::Fry};
inline constexpr int kLongitudinalStates[] = {xi::vx, xi::dtheta_f, xi::dtheta_r,
                                              xi::Ffx, xi::Frx};

}  // namespace motobs
