#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "motobs/estimator/trim.hpp"
#include "motobs/simulator/simulator.hpp"
#include "test_support.hpp"

using namespace motobs;

namespace {

const TrimPoint& trim_100() {
  static const TrimPoint tp = find_trim(kph_to_mps(100.0), test::nominal());
  return tp;
}

ExtendedState wobble(const ExtendedState& X) {
  ExtendedState Y = X;
  Y(xi::dphi) = 0.05;
  Y(xi::ddelta) = -0.05;
  return Y;
}

ExtendedState yaw_rotated(const ExtendedState& X, double d) {
  ExtendedState Y = X;
  Y(xi::psi) += d;
  Y(xi::vx) = std::cos(d) * X(xi::vx) - std::sin(d) * X(xi::vy);
  Y(xi::vy) = std::sin(d) * X(xi::vx) + std::cos(d) * X(xi::vy);
  return Y;
}

}  // namespace

TEST(Rk4, ExponentialDecay) {
  Eigen::Matrix<double, 1, 1> x;
  x << 1.0;
  auto f = [](const Eigen::Matrix<double, 1, 1>& y) -> Eigen::Matrix<double, 1, 1> { return -y; };
  for (int k = 0; k < 1000; ++k) x = rk4_step(f, x, 1e-3);
  EXPECT_NEAR(x(0), std::exp(-1.0), 1e-9);
}

TEST(Rk4, FourthOrderOnTheModel) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const ExtendedState X0 = wobble(tp.X_star);
  auto run = [&](double dt) {
    ExtendedState X = X0;
    const int n = static_cast<int>(std::lround(0.4 / dt));
    for (int k = 0; k < n; ++k) X = step(X, tp.u_star, dt, p);
    return X;
  };
  // Tire relaxation poles near -900 1/s bound the stable step at about 3 ms.
  const ExtendedState ref = run(0.001 / 16);
  const double e1 = (run(0.002) - ref).segment<10>(0).cwiseAbs().maxCoeff();
  const double e2 = (run(0.001) - ref).segment<10>(0).cwiseAbs().maxCoeff();
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 10.0) << e1 << " " << e2;
  EXPECT_LT(ratio, 24.0) << e1 << " " << e2;
}

TEST(Step, RejectsBadSteps) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  EXPECT_THROW(step(tp.X_star, tp.u_star, 0.0, p), std::invalid_argument);
  EXPECT_THROW(step(tp.X_star, tp.u_star, 0.02, p), std::invalid_argument);
  EXPECT_THROW(simulate(tp.X_star, InputTrace::constant(tp.u_star), 0.011, 1.0, p),
               std::invalid_argument);
}

TEST(Step, TrimIsAFixedPoint) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const ExtendedState X1 = step(tp.X_star, tp.u_star, 0.001, p);
  EXPECT_LT((X1 - tp.X_star).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Rhs, CopyRowsAndRollGuard) {
  const ParameterSet& p = test::nominal();
  ExtendedState X = wobble(trim_100().X_star);
  X(xi::dpsi) = 0.01;
  X(xi::phi) = 0.2;
  const ExtendedState Xdot = extended_rhs(X, trim_100().u_star, p);
  EXPECT_EQ(Xdot(xi::psi), X(xi::dpsi));
  EXPECT_EQ(Xdot(xi::phi), X(xi::dphi));
  EXPECT_EQ(Xdot(xi::delta), X(xi::ddelta));

  X(xi::phi) = 1.6;
  EXPECT_THROW(extended_rhs(X, trim_100().u_star, p), NumericError);
  X(xi::phi) = std::nan("");
  EXPECT_THROW(extended_rhs(X, trim_100().u_star, p), NumericError);
}

TEST(Rhs, CoastingDecelerates) {
  const ParameterSet& p = test::nominal();
  ExtendedState X = trim_100().X_star;
  X(xi::Ffx) = 0.0;
  X(xi::Frx) = 0.0;
  X(xi::dtheta_f) = X(xi::vx) / p.R_f;
  X(xi::dtheta_r) = X(xi::vx) / p.R_r;
  EXPECT_LT(extended_rhs(X, InputVector::Zero(), p)(xi::vx), 0.0);
}

TEST(InputTrace, ZeroOrderHold) {
  const InputTrace trace({0.0, 1.0, 2.0},
                         {InputVector(1, 0, 0, 0), InputVector(2, 0, 0, 0), InputVector(3, 0, 0, 0)});
  EXPECT_EQ(trace.at(0.0)(0), 1.0);
  EXPECT_EQ(trace.at(0.999)(0), 1.0);
  EXPECT_EQ(trace.at(1.0)(0), 2.0);
  EXPECT_EQ(trace.at(1.5)(0), 2.0);
  EXPECT_EQ(trace.at(50.0)(0), 3.0);
  EXPECT_THROW(InputTrace({1.0, 0.0}, {InputVector::Zero(), InputVector::Zero()}), ConfigError);
  EXPECT_THROW(InputTrace({0.0}, {}), ConfigError);
}

TEST(Simulate, GridAndZeroDuration) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const Trajectory empty = simulate(tp.X_star, InputTrace::constant(tp.u_star), 0.001, 0.0, p);
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(empty.X[0], tp.X_star);

  const Trajectory tr = simulate(tp.X_star, InputTrace::constant(tp.u_star), 0.003, 0.1, p);
  EXPECT_EQ(tr.size(), 35u);  // ceil(0.1 / 0.003) + 1
  EXPECT_EQ(step_count(1.0, 0.001), 1000u);
  for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_DOUBLE_EQ(tr.t[k], 0.003 * k);
  EXPECT_EQ(tr.X.size(), tr.size());
  EXPECT_EQ(tr.ax.size(), tr.size());
  EXPECT_FALSE(tr.failure);
}

TEST(Simulate, LateInputTraceRejected) {
  const TrimPoint& tp = trim_100();
  EXPECT_THROW(simulate(tp.X_star, InputTrace({0.5}, {tp.u_star}), 0.001, 1.0, test::nominal()),
               ConfigError);
}

TEST(Simulate, TrimHeld) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const Trajectory tr = simulate(tp.X_star, InputTrace::constant(tp.u_star), 0.001, 2.0, p);
  double drift = 0.0;
  for (const auto& X : tr.X) drift = std::max(drift, (X - tp.X_star).cwiseAbs().maxCoeff());
  EXPECT_LT(drift, 1e-6);
  for (const auto& X : tr.X) {
    EXPECT_EQ(X(xi::phi), 0.0);
    EXPECT_EQ(X(xi::vy), 0.0);
  }
}

TEST(Simulate, DriveStepAccelerates) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  InputVector u = tp.u_star;
  u(ui::tau_D) *= 1.1;
  const Trajectory tr = simulate(tp.X_star, InputTrace::constant(u), 0.001, 1.0, p);
  for (std::size_t k = 2; k < tr.size(); ++k) {
    ASSERT_GT(tr.X[k](xi::vx), tr.X[k - 1](xi::vx)) << "t=" << tr.t[k];
  }
}

TEST(Simulate, Deterministic) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const ExtendedState X0 = wobble(tp.X_star);
  const Trajectory a = simulate(X0, InputTrace::constant(tp.u_star), 0.001, 0.5, p);
  const Trajectory b = simulate(X0, InputTrace::constant(tp.u_star), 0.001, 0.5, p);
  EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
  for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a.X[k], b.X[k]);
}

TEST(Simulate, YawEquivariantTrajectories) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  InputVector u = tp.u_star;
  u(ui::tau) = 0.5;
  const ExtendedState X0 = wobble(tp.X_star);
  const double d = 0.7;
  const Trajectory a = simulate(X0, InputTrace::constant(u), 0.001, 5.0, p);
  const Trajectory b = simulate(yaw_rotated(X0, d), InputTrace::constant(u), 0.001, 5.0, p);
  ASSERT_FALSE(a.failure);
  ASSERT_FALSE(b.failure);
  ASSERT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const ExtendedState expected = yaw_rotated(a.X[k], d);
    worst = std::max(worst, (b.X[k] - expected).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-7);
  // The motion must actually turn for this to mean anything.
  EXPECT_GT(std::abs(a.X.back()(xi::psi)), 1e-3);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_100();
  const Trajectory tr = simulate(tp.X_star, InputTrace::constant(tp.u_star), 0.001, 0.002, p);
  std::istringstream in(trajectory_csv(tr));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTrajectoryHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 16);
  }
  EXPECT_EQ(rows, 3);
}
