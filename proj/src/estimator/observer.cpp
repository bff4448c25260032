#include "motobs/estimator/observer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "motobs/error.hpp"
#include "motobs/estimator/riccati.hpp"

namespace motobs {

Matrix2x14 velocity_selector() {
  Matrix2x14 H = Matrix2x14::Zero();
  H(0, xi::vx) = 1.0;
  H(1, xi::vy) = 1.0;
  return H;
}

Matrix2x14 rate_selector() {
  Matrix2x14 F = Matrix2x14::Zero();
  F(0, xi::dpsi) = 1.0;
  F(1, xi::dphi) = 1.0;
  return F;
}

MeasurementModel measurement_model(const Matrix14& A, const Matrix14x4& B) {
  const Matrix2x14 H = velocity_selector();
  MeasurementModel m;
  m.C.topRows<2>() = H * A;
  m.C.bottomRows<2>() = rate_selector();
  m.D.topRows<2>() = H * B;
  return m;
}

LinearObserverDesign design_from_matrices(const Matrix14& A, const Matrix14x4& B,
                                          const Matrix14& Q_w, const Matrix4& R_w,
                                          const GainOptions& options) {
  LinearObserverDesign d;
  d.A = A;
  d.B = B;
  const MeasurementModel mm = measurement_model(A, B);
  d.C = mm.C;
  d.D = mm.D;
  d.H = velocity_selector();
  d.F = rate_selector();
  d.Q_w = Q_w;
  d.R_w = R_w;
  const GainDesign g = design_gain(A, d.C, Q_w, R_w, options);
  d.G = g.G;
  d.P = g.P;
  d.closed_loop_spectrum = g.closed_loop_spectrum;
  d.unobservable_spectrum = g.unobservable_spectrum;
  d.observable_dim = g.observable_dim;
  d.riccati_residual = g.riccati_residual;
  d.reduced_riccati_residual = g.reduced_riccati_residual;
  d.reduced_q_norm = g.reduced_q_norm;
  d.stability_threshold = g.stability_threshold;
  return d;
}

LinearObserverDesign design_observer(const TrimPoint& trim, const ParameterSet& p,
                                     const Matrix14& Q_w, const Matrix4& R_w,
                                     const GainOptions& options) {
  const LinearModel lm = linearize(trim, p);
  LinearObserverDesign d = design_from_matrices(lm.A, lm.B, Q_w, R_w, options);
  d.trim = trim;
  return d;
}

Vector14 observer_derivative(const LinearObserverDesign& d, const Vector14& x_hat,
                             const MeasurementVector& s, const InputVector& du) {
  return (d.A - d.G * d.C) * x_hat + d.G * s + (d.B - d.G * d.D) * du;
}

ObserverStepper::ObserverStepper(const LinearObserverDesign& design, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("observer step must be positive");
  // exp([[Acl, Bs, Bu], [0, 0, 0], [0, 0, 0]] dt) holds the transition and
  // the integrated input maps.
  constexpr int n = 14;
  constexpr int m = 8;
  // Forces and rates differ by orders of magnitude, so A_cl is badly
  // non-normal. Exponentiate the balanced system D^-1 A_cl D instead, with
  // input columns shrunk to its size, and map the blocks back.
  const Matrix14 A_cl = design.A - design.G * design.C;
  const Vector14 d = balancing_scale(A_cl, Eigen::MatrixXd(0, n));
  const Matrix14 A_bal = d.cwiseInverse().asDiagonal() * A_cl * d.asDiagonal();
  Eigen::Matrix<double, n, m> inputs;
  inputs << design.G, design.B - design.G * design.D;
  inputs = d.cwiseInverse().asDiagonal() * inputs;
  const double a_norm = std::max(A_bal.cwiseAbs().colwise().sum().maxCoeff(), 1.0);
  Eigen::Matrix<double, m, 1> col_scale;
  for (int j = 0; j < m; ++j) {
    col_scale(j) = std::max(inputs.col(j).cwiseAbs().sum() / a_norm, 1.0);
  }
  Eigen::Matrix<double, n + m, n + m> aug = Eigen::Matrix<double, n + m, n + m>::Zero();
  aug.topLeftCorner<n, n>() = A_bal;
  aug.topRightCorner<n, m>() = inputs * col_scale.cwiseInverse().asDiagonal();
  const Eigen::Matrix<double, n + m, n + m> E = (aug * dt).exp();
  Phi_ = d.asDiagonal() * E.topLeftCorner<n, n>() * d.cwiseInverse().asDiagonal();
  const Eigen::Matrix<double, n, m> Gamma =
      d.asDiagonal() * E.topRightCorner<n, m>() * col_scale.asDiagonal();
  Gamma_s_ = Gamma.leftCols<4>();
  Gamma_u_ = Gamma.rightCols<4>();
  if (!Phi_.allFinite() || !Gamma_s_.allFinite() || !Gamma_u_.allFinite()) {
    throw NumericError("observer discretization produced non-finite entries");
  }
}

Vector14 ObserverStepper::step(const Vector14& x_hat, const MeasurementVector& s,
                               const InputVector& du) const {
  Vector14 next = Phi_ * x_hat + Gamma_s_ * s + Gamma_u_ * du;
  if (!next.allFinite()) throw NumericError("observer state became non-finite");
  return next;
}

Vector14 observer_step(const Vector14& x_hat, const MeasurementVector& s,
                       const InputVector& du, const LinearObserverDesign& design, double dt) {
  return ObserverStepper(design, dt).step(x_hat, s, du);
}

MeasurementTrace synthesize_measurements(const Trajectory& plant,
                                         const std::optional<MeasurementNoise>& noise) {
  MeasurementTrace m;
  m.t = plant.t;
  m.s.resize(plant.size());
  std::mt19937_64 rng(noise ? noise->seed : 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool noisy = noise && noise->enabled();
  for (std::size_t k = 0; k < plant.size(); ++k) {
    MeasurementVector s;
    s(mi::ax) = plant.ax[k];
    s(mi::ay) = plant.ay[k];
    s(mi::dpsi) = plant.X[k](xi::dpsi);
    s(mi::dphi) = plant.X[k](xi::dphi);
    if (noisy) {
      for (int i = 0; i < 4; ++i) s(i) += noise->std_dev(i) * normal(rng);
    }
    m.s[k] = s;
  }
  return m;
}

ExtendedState no_slip_initial_estimate(double v_nominal, const ParameterSet& p) {
  ExtendedState X = ExtendedState::Zero();
  X(xi::vx) = v_nominal;
  X(xi::dtheta_f) = v_nominal / p.R_f;
  X(xi::dtheta_r) = v_nominal / p.R_r;
  return X;
}

EstimateTrajectory run_observer(const MeasurementTrace& measurements, const InputTrace& inputs,
                                const LinearObserverDesign& design, const Vector14& x_hat0,
                                double dt) {
  if (measurements.t.size() != measurements.s.size()) {
    throw ConfigError("measurement trace has mismatched time and value lengths");
  }
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const double expected = static_cast<double>(k) * dt;
    if (std::abs(measurements.t[k] - expected) > 1e-6 * std::max(dt, 1e-12)) {
      std::ostringstream os;
      os << "measurement sample " << k << " at t=" << measurements.t[k]
         << " is off the dt grid (expected " << expected << ")";
      throw ConfigError(os.str());
    }
  }
  if (inputs.empty()) throw ConfigError("input trace is empty");

  const ObserverStepper stepper(design, dt);
  const ExtendedState& X_star = design.trim.X_star;
  const InputVector& u_star = design.trim.u_star;

  EstimateTrajectory out;
  out.t.reserve(measurements.size());
  out.X_hat.reserve(measurements.size());
  Vector14 x_hat = x_hat0;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    out.t.push_back(measurements.t[k]);
    out.X_hat.push_back(x_hat + X_star);
    if (k + 1 == measurements.size()) break;
    const InputVector du = inputs.at(measurements.t[k]) - u_star;
    try {
      x_hat = stepper.step(x_hat, measurements.s[k], du);
    } catch (const NumericError& err) {
      std::ostringstream os;
      os << err.what() << " at t=" << measurements.t[k];
      out.failure = os.str();
      break;
    }
  }
  return out;
}

}  // namespace motobs
