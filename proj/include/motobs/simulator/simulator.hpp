#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"
#include "motobs/tire/tire.hpp"

namespace motobs {

/// Classical fourth-order Runge-Kutta step for any `x' = f(x)`.
template <typename F, typename V>
V rk4_step(F&& f, const V& x, double dt) {
  const V k1 = f(x);
  const V k2 = f(V(x + 0.5 * dt * k1));
  const V k3 = f(V(x + 0.5 * dt * k2));
  const V k4 = f(V(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Right-hand side plus the side information the trajectory records.
struct RhsEvaluation {
  ExtendedState Xdot = ExtendedState::Zero();
  SlipState slips;
};

/// h(X, u): kinematic copy rows, the Jourdain solve, and tire relaxation.
/// Throws NumericError when |phi| >= pi/2 or X is not finite, and
/// DegenerateConfiguration for a singular mass matrix.
RhsEvaluation evaluate_rhs(const ExtendedState& X, const InputVector& u,
                           const ParameterSet& p);

ExtendedState extended_rhs(const ExtendedState& X, const InputVector& u,
                           const ParameterSet& p);

inline constexpr double kMaxStep = 0.01;

/// One RK4 step of the extended model. Requires dt in (0, kMaxStep].
ExtendedState step(const ExtendedState& X, const InputVector& u, double dt,
                   const ParameterSet& p);

/// Sampled inputs with zero-order hold. The first sample must be at t <= 0;
/// the last sample is held indefinitely.
class InputTrace {
 public:
  InputTrace() = default;
  InputTrace(std::vector<double> times, std::vector<InputVector> inputs);

  static InputTrace constant(const InputVector& u);

  InputVector at(double t) const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<InputVector>& inputs() const { return inputs_; }
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  std::vector<InputVector> inputs_;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<ExtendedState> X;
  std::vector<InputVector> u;
  std::vector<double> ax;  // vdot_x from h at each sample
  std::vector<double> ay;  // vdot_y from h at each sample
  std::vector<bool> low_speed;
  /// Set when the run stopped early; the trajectory holds the samples up to
  /// the failure.
  std::optional<std::string> failure;

  std::size_t size() const { return t.size(); }
};

/// Fixed-step simulation over [0, T]; ceil(T/dt) steps. Runtime numeric
/// failures truncate the trajectory and are recorded in `failure`.
Trajectory simulate(const ExtendedState& X0, const InputTrace& inputs, double dt,
                    double T, const ParameterSet& p);

/// Number of steps needed to cover [0, T] at step dt.
std::size_t step_count(double T, double dt);

/// `t,psi,...,Fry,ax,ay`, %.9g, one row per sample.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
std::string trajectory_csv(const Trajectory& traj);

extern const char* const kTrajectoryHeader;

}  // namespace motobs
