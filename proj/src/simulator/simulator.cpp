#include "motobs/simulator/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "motobs/error.hpp"
#include "motobs/multibody/multibody.hpp"

namespace motobs {

namespace {

std::string dump_state(const ExtendedState& X) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int i = 0; i < X.size(); ++i) os << (i ? ", " : "") << X(i);
  os << "]";
  return os.str();
}

}  // namespace

RhsEvaluation evaluate_rhs(const ExtendedState& X, const InputVector& u,
                           const ParameterSet& p) {
  if (!X.allFinite() || !u.allFinite()) {
    throw NumericError("non-finite state or input: X = " + dump_state(X));
  }
  if (!(std::abs(X(xi::phi)) < 0.5 * std::numbers::pi)) {
    throw NumericError("roll angle out of range: phi = " + std::to_string(X(xi::phi)));
  }
  const GeneralizedState gs = generalized_from_extended(X);
  const StaticLoads loads = static_loads(p);
  TireForceState tires;
  tires.Ffx = X(xi::Ffx);
  tires.Frx = X(xi::Frx);
  tires.Ffy = X(xi::Ffy);
  tires.Fry = X(xi::Fry);
  tires.Ffz = loads.front;
  tires.Frz = loads.rear;

  RhsEvaluation out;
  out.Xdot(xi::psi) = X(xi::dpsi);
  out.Xdot(xi::phi) = X(xi::dphi);
  out.Xdot(xi::delta) = X(xi::ddelta);
  out.Xdot.segment<7>(xi::velocity_begin) = generalized_accel(gs.q, gs.v, tires, u, p);

  const WheelSpeeds wheels{X(xi::dtheta_f), X(xi::dtheta_r)};
  out.slips = slip_state(gs.q, gs.v, wheels, p);
  const SteadyForces F0 = steady_state_forces(out.slips, loads, p);
  const PlanarVelocity vV = vehicle_frame_velocity(gs.q, gs.v);
  out.Xdot.segment<4>(xi::force_begin) =
      relaxation_rhs(X.segment<4>(xi::force_begin), F0, vV.vx, vV.vy, p);
  return out;
}

ExtendedState extended_rhs(const ExtendedState& X, const InputVector& u,
                           const ParameterSet& p) {
  return evaluate_rhs(X, u, p).Xdot;
}

ExtendedState step(const ExtendedState& X, const InputVector& u, double dt,
                   const ParameterSet& p) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw std::invalid_argument("step: dt must lie in (0, 0.01]");
  }
  const ExtendedState next =
      rk4_step([&](const ExtendedState& x) { return extended_rhs(x, u, p); }, X, dt);
  if (!next.allFinite()) {
    throw NumericError("integration produced NaN/Inf; state before step: " +
                       dump_state(X));
  }
  return next;
}

InputTrace::InputTrace(std::vector<double> times, std::vector<InputVector> inputs)
    : times_(std::move(times)), inputs_(std::move(inputs)) {
  if (times_.size() != inputs_.size() || times_.empty()) {
    throw ConfigError("input trace: times and inputs must be non-empty and equal length");
  }
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw ConfigError("input trace: times must be non-decreasing");
  }
}

InputTrace InputTrace::constant(const InputVector& u) { return InputTrace({0.0}, {u}); }

InputVector InputTrace::at(double t) const {
  // Last sample with time <= t (a small tolerance absorbs grid rounding).
  const auto it = std::upper_bound(times_.begin(), times_.end(), t + 1e-12);
  if (it == times_.begin()) return inputs_.front();
  return inputs_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

std::size_t step_count(double T, double dt) {
  if (T <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

Trajectory simulate(const ExtendedState& X0, const InputTrace& inputs, double dt,
                    double T, const ParameterSet& p) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw std::invalid_argument("simulate: dt must lie in (0, 0.01]");
  }
  if (T < 0.0) throw std::invalid_argument("simulate: T must be non-negative");
  if (inputs.empty() || inputs.times().front() > 1e-12) {
    throw ConfigError("simulate: input trace must start at or before t = 0");
  }
  const std::size_t n = step_count(T, dt);
  Trajectory traj;
  traj.dt = dt;
  traj.t.reserve(n + 1);
  traj.X.reserve(n + 1);
  traj.u.reserve(n + 1);
  traj.ax.reserve(n + 1);
  traj.ay.reserve(n + 1);
  traj.low_speed.reserve(n + 1);

  ExtendedState X = X0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const InputVector u = inputs.at(t);
    try {
      const RhsEvaluation ev = evaluate_rhs(X, u, p);
      traj.t.push_back(t);
      traj.X.push_back(X);
      traj.u.push_back(u);
      traj.ax.push_back(ev.Xdot(xi::vx));
      traj.ay.push_back(ev.Xdot(xi::vy));
      traj.low_speed.push_back(ev.slips.low_speed);
      if (k < n) X = step(X, u, dt, p);
    } catch (const NumericError& ex) {
      std::ostringstream os;
      os << "t = " << t << ": " << ex.what();
      traj.failure = os.str();
      break;
    }
  }
  return traj;
}

}  // namespace motobs
