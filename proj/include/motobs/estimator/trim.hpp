#pragma once

#include <string>
#include <vector>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"

namespace motobs {

/// Upright rectilinear equilibrium h(X*, u*) = 0.
struct TrimPoint {
  ExtendedState X_star = ExtendedState::Zero();
  InputVector u_star = InputVector::Zero();
  double residual_norm = 0.0;  // ||h(X*, u*)||_inf
  int iterations = 0;
  std::vector<double> residual_history;
};

inline constexpr double kTrimMinSpeed = 5.0;
inline constexpr double kTrimMaxSpeed = 60.0;
inline constexpr double kTrimTolerance = 1e-8;

/// Newton iteration on (dtheta_f, dtheta_r, Ffx, Frx, tau_D) with vx fixed
/// and every lateral, roll and steer entry pinned to zero. Starts from the
/// no-slip seed. Throws TrimError on a bad target, singular Jacobian or no
/// convergence within `max_iterations`.
TrimPoint find_trim(double v_target, const ParameterSet& p, int max_iterations = 50);

inline double kph_to_mps(double kph) { return kph / 3.6; }

}  // namespace motobs
