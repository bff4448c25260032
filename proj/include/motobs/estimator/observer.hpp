#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"
#include "motobs/estimator/linearize.hpp"
#include "motobs/estimator/riccati.hpp"
#include "motobs/estimator/trim.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

using Matrix2x14 = Eigen::Matrix<double, 2, 14>;

/// Measurement rows in the order produced by C: (vdot_x, vdot_y, dpsi, dphi).
namespace mi {
inline constexpr int ax = 0;
inline constexpr int ay = 1;
inline constexpr int dpsi = 2;
inline constexpr int dphi = 3;
}  // namespace mi

using MeasurementVector = Vector4;

/// Picks (vx, vy) out of an extended state.
Matrix2x14 velocity_selector();
/// Picks (dpsi, dphi) out of an extended state.
Matrix2x14 rate_selector();

struct MeasurementModel {
  Matrix4x14 C = Matrix4x14::Zero();
  Matrix4 D = Matrix4::Zero();
};

/// C = [H A; F], D = [H B; 0].
MeasurementModel measurement_model(const Matrix14& A, const Matrix14x4& B);

struct LinearObserverDesign {
  TrimPoint trim;
  Matrix14 A = Matrix14::Zero();
  Matrix14x4 B = Matrix14x4::Zero();
  Matrix4x14 C = Matrix4x14::Zero();
  Matrix4 D = Matrix4::Zero();
  Matrix14x4 G = Matrix14x4::Zero();
  Matrix2x14 H = Matrix2x14::Zero();
  Matrix2x14 F = Matrix2x14::Zero();
  Matrix14 Q_w = Matrix14::Identity();
  Matrix4 R_w = Matrix4::Identity();
  Matrix14 P = Matrix14::Zero();
  Eigen::VectorXcd closed_loop_spectrum;
  Eigen::VectorXcd unobservable_spectrum;
  int observable_dim = 0;
  double riccati_residual = 0.0;
  double reduced_riccati_residual = 0.0;
  double reduced_q_norm = 0.0;
  double stability_threshold = 0.0;
};

/// Trim, linearization, measurement matrices and LQR gain at one speed.
LinearObserverDesign design_observer(const TrimPoint& trim, const ParameterSet& p,
                                     const Matrix14& Q_w, const Matrix4& R_w,
                                     const GainOptions& options = {});

/// Builds a design from given matrices (no trim needed).
LinearObserverDesign design_from_matrices(const Matrix14& A, const Matrix14x4& B,
                                          const Matrix14& Q_w, const Matrix4& R_w,
                                          const GainOptions& options = {});

/// (A - G C) x + G s + (B - G D) u, all in deviation coordinates.
Vector14 observer_derivative(const LinearObserverDesign& d, const Vector14& x_hat,
                             const MeasurementVector& s, const InputVector& du);

/// Exact discretization of the observer over one step with the measurement
/// and input held constant across the step.
class ObserverStepper {
 public:
  ObserverStepper(const LinearObserverDesign& design, double dt);

  Vector14 step(const Vector14& x_hat, const MeasurementVector& s,
                const InputVector& du) const;

  double dt() const { return dt_; }
  const Matrix14& transition() const { return Phi_; }

 private:
  double dt_;
  Matrix14 Phi_;
  Matrix14x4 Gamma_s_;
  Matrix14x4 Gamma_u_;
};

/// One step of the observer. `s` and `du` are deviations from the trim.
Vector14 observer_step(const Vector14& x_hat, const MeasurementVector& s,
                       const InputVector& du, const LinearObserverDesign& design, double dt);

/// Sampled measurements in C-row order.
struct MeasurementTrace {
  std::vector<double> t;
  std::vector<MeasurementVector> s;

  std::size_t size() const { return t.size(); }
};

struct MeasurementNoise {
  MeasurementVector std_dev = MeasurementVector::Zero();  // C-row order
  std::uint64_t seed = 0;

  bool enabled() const { return (std_dev.array() > 0.0).any(); }
};

/// Idealized IMU: true vdot_x, vdot_y from the plant right-hand side and true
/// dpsi, dphi, plus optional Gaussian noise.
MeasurementTrace synthesize_measurements(const Trajectory& plant,
                                         const std::optional<MeasurementNoise>& noise = {});

/// No-slip initial estimate in absolute coordinates: vx = v, wheel rates v/R,
/// every other entry zero.
ExtendedState no_slip_initial_estimate(double v_nominal, const ParameterSet& p);

struct EstimateTrajectory {
  std::vector<double> t;
  std::vector<ExtendedState> X_hat;  // absolute, x_hat + X*
  std::optional<std::string> failure;

  std::size_t size() const { return t.size(); }
};

/// Runs the observer over an aligned measurement trace. `x_hat0` is a
/// deviation from the design trim. Measurements must sit on the k*dt grid.
EstimateTrajectory run_observer(const MeasurementTrace& measurements, const InputTrace& inputs,
                                const LinearObserverDesign& design, const Vector14& x_hat0,
                                double dt);

}  // namespace motobs
