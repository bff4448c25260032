#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "motobs/estimator/linearize.hpp"
#include "motobs/estimator/observer.hpp"
#include "motobs/estimator/riccati.hpp"
#include "motobs/estimator/trim.hpp"
#include "motobs/simulator/simulator.hpp"
#include "test_support.hpp"

using namespace motobs;
using Eigen::MatrixXd;

namespace {

const TrimPoint& trim_at(double kph) {
  static std::map<double, TrimPoint> cache;
  auto it = cache.find(kph);
  if (it == cache.end()) it = cache.emplace(kph, find_trim(kph_to_mps(kph), test::nominal())).first;
  return it->second;
}

const LinearModel& linear_at(double kph) {
  static std::map<double, LinearModel> cache;
  auto it = cache.find(kph);
  if (it == cache.end()) it = cache.emplace(kph, linearize(trim_at(kph), test::nominal())).first;
  return it->second;
}

GainOptions marginal() {
  GainOptions o;
  o.allow_marginal_unobservable = true;
  return o;
}

bool is_lateral(int i) {
  for (int j : kLateralStates) {
    if (j == i) return true;
  }
  return false;
}

}  // namespace

TEST(Trim, HundredKph) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_at(100.0);
  const double v = 100.0 / 3.6;
  EXPECT_DOUBLE_EQ(tp.X_star(xi::vx), v);
  EXPECT_LT(tp.residual_norm, 1e-8);
  EXPECT_NEAR(tp.X_star(xi::dtheta_f), v / p.R_f, 1e-6 * v / p.R_f);
  // The rear wheel spins slightly faster than rolling to carry the drag.
  EXPECT_GT(tp.X_star(xi::dtheta_r), v / p.R_r);
  EXPECT_LT(tp.X_star(xi::dtheta_r), 1.01 * v / p.R_r);
  EXPECT_NEAR(tp.X_star(xi::Ffx), 0.0, 1e-6);
  EXPECT_NEAR(tp.X_star(xi::Frx), 0.5 * 1.206 * 0.52 * 0.6 * v * v, 1e-6);
  EXPECT_NEAR(tp.u_star(ui::tau_D), tp.X_star(xi::Frx) * p.R_r, 1e-6);
}

TEST(Trim, StructureIsExact) {
  for (double kph : {50.0, 80.0, 100.0}) {
    const TrimPoint& tp = trim_at(kph);
    EXPECT_LT(tp.residual_norm, 1e-8);
    for (int i : kLateralStates) EXPECT_EQ(tp.X_star(i), 0.0) << i;
    EXPECT_EQ(tp.u_star(ui::tau), 0.0);
    EXPECT_EQ(tp.u_star(ui::tau_Bf), 0.0);
    EXPECT_EQ(tp.u_star(ui::tau_Br), 0.0);
    const ExtendedState h = extended_rhs(tp.X_star, tp.u_star, test::nominal());
    EXPECT_LT(h.cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_LT(trim_at(50.0).u_star(ui::tau_D), trim_at(80.0).u_star(ui::tau_D));
  EXPECT_LT(trim_at(80.0).u_star(ui::tau_D), trim_at(100.0).u_star(ui::tau_D));
}

TEST(Trim, RejectsOutOfRangeTargets) {
  EXPECT_THROW(find_trim(0.1 / 3.6, test::nominal()), TrimError);
  EXPECT_THROW(find_trim(70.0, test::nominal()), TrimError);
  EXPECT_THROW(find_trim(std::nan(""), test::nominal()), TrimError);
}

TEST(Linearize, CopyRowsAndDecoupling) {
  for (double kph : {50.0, 80.0, 100.0}) {
    const LinearModel& lm = linear_at(kph);
    const double norm = lm.A.cwiseAbs().rowwise().sum().maxCoeff();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 14; ++c) {
        EXPECT_EQ(lm.A(r, c), c == xi::dpsi + r ? 1.0 : 0.0) << r << "," << c;
      }
    }
    for (int r = 0; r < 14; ++r) {
      for (int c = 0; c < 14; ++c) {
        if (is_lateral(r) != is_lateral(c)) {
          EXPECT_LT(std::abs(lm.A(r, c)), 1e-6 * norm);
        }
      }
      if (is_lateral(r)) {
        EXPECT_LT(std::abs(lm.B(r, ui::tau_D)), 1e-6 * norm);
        EXPECT_LT(std::abs(lm.B(r, ui::tau_Bf)), 1e-6 * norm);
        EXPECT_LT(std::abs(lm.B(r, ui::tau_Br)), 1e-6 * norm);
      } else {
        EXPECT_LT(std::abs(lm.B(r, ui::tau)), 1e-6 * norm);
      }
    }
    EXPECT_GT(lm.B(xi::dtheta_r, ui::tau_D), 0.0);
  }
}

TEST(Linearize, MatchesSmallStepResponse) {
  const ParameterSet& p = test::nominal();
  const TrimPoint& tp = trim_at(80.0);
  const LinearModel& lm = linear_at(80.0);
  const ExtendedState f0 = extended_rhs(tp.X_star, tp.u_star, p);
  // The remainder of a first-order model shrinks quadratically with the step.
  auto remainder = [&](double s) {
    ExtendedState dx = ExtendedState::Zero();
    dx(xi::dphi) = 1e-4 * s;
    dx(xi::vx) = 1e-4 * s;
    dx(xi::Fry) = 1e-2 * s;
    const InputVector du(1e-3 * s, 1e-2 * s, 0.0, 0.0);
    const ExtendedState h = extended_rhs(tp.X_star + dx, tp.u_star + du, p) - f0;
    const ExtendedState lin = lm.A * dx + lm.B * du;
    EXPECT_LT((h - lin).cwiseAbs().maxCoeff(), 1e-5 * lin.cwiseAbs().maxCoeff());
    return (h - lin).cwiseAbs().maxCoeff();
  };
  const double e1 = remainder(1.0);
  const double e2 = remainder(0.5);
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(MeasurementModel, Selectors) {
  ExtendedState X;
  for (int i = 0; i < 14; ++i) X(i) = 10.0 + i;
  const Eigen::Vector2d hx = velocity_selector() * X;
  const Eigen::Vector2d fx = rate_selector() * X;
  EXPECT_EQ(hx, Eigen::Vector2d(X(3), X(4)));
  EXPECT_EQ(fx, Eigen::Vector2d(X(5), X(6)));
}

TEST(MeasurementModel, BlockAlgebra) {
  const LinearModel& lm = linear_at(100.0);
  const MeasurementModel mm = measurement_model(lm.A, lm.B);
  EXPECT_EQ(mm.D.bottomRows<2>(), (Eigen::Matrix<double, 2, 4>::Zero()));
  ExtendedState x;
  for (int i = 0; i < 14; ++i) x(i) = std::sin(1.0 + i);
  const InputVector u(0.3, -2.0, 1.0, 0.5);
  const Vector4 s = mm.C * x + mm.D * u;
  const ExtendedState xdot = lm.A * x + lm.B * u;
  EXPECT_NEAR(s(mi::ax), xdot(xi::vx), 1e-12 * std::max(1.0, std::abs(xdot(xi::vx))));
  EXPECT_NEAR(s(mi::ay), xdot(xi::vy), 1e-12 * std::max(1.0, std::abs(xdot(xi::vy))));
  EXPECT_EQ(s(mi::dpsi), x(xi::dpsi));
  EXPECT_EQ(s(mi::dphi), x(xi::dphi));
}

TEST(Riccati, ScalarHandCase) {
  MatrixXd A(1, 1), C(1, 1), Q(1, 1), R(1, 1);
  A << -1;
  C << 1;
  Q << 1;
  R << 1;
  const MatrixXd P = solve_filter_riccati(A, C, Q, R);
  EXPECT_NEAR(P(0, 0), std::sqrt(2.0) - 1.0, 1e-10);
  const GainDesign g = design_gain(A, C, Q, R);
  EXPECT_NEAR(g.G(0, 0), std::sqrt(2.0) - 1.0, 1e-10);
  ASSERT_EQ(g.closed_loop_spectrum.size(), 1);
  EXPECT_NEAR(g.closed_loop_spectrum(0).real(), -std::sqrt(2.0), 1e-10);
  EXPECT_LT(g.riccati_residual, 1e-12);
}

TEST(Riccati, UnstableScalarIsStabilized) {
  MatrixXd A(1, 1), C(1, 1), Q(1, 1), R(1, 1);
  A << 2;
  C << 1;
  Q << 1;
  R << 1;
  // p^2 - 4p - 1 = 0, stabilizing root 2 + sqrt(5).
  const GainDesign g = design_gain(A, C, Q, R);
  EXPECT_NEAR(g.P(0, 0), 2.0 + std::sqrt(5.0), 1e-10);
  EXPECT_NEAR(g.closed_loop_spectrum(0).real(), -std::sqrt(5.0), 1e-10);
}

TEST(Riccati, LyapunovSolve) {
  MatrixXd F(2, 2), W(2, 2);
  F << -1, 2, 0, -3;
  W << 2, 1, 1, 4;
  const MatrixXd X = solve_lyapunov(F, W);
  EXPECT_LT((F * X + X * F.transpose() + W).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((X - X.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Riccati, StaircaseSplitsKnownSystem) {
  MatrixXd A = MatrixXd::Zero(3, 3);
  A.diagonal() << -1, -2, -3;
  MatrixXd C(1, 3);
  C << 1, 1, 0;
  const ObservabilitySplit s = observability_staircase(A, C);
  EXPECT_EQ(s.observable_dim, 2);
  ASSERT_EQ(s.unobservable.cols(), 1);
  EXPECT_NEAR(std::abs(s.unobservable(2, 0)), 1.0, 1e-12);
  EXPECT_LT((s.observable.transpose() * s.unobservable).norm(), 1e-12);

  const GainDesign g = design_gain(A, C, MatrixXd::Identity(3, 3), MatrixXd::Identity(1, 1));
  EXPECT_EQ(g.observable_dim, 2);
  ASSERT_EQ(g.unobservable_spectrum.size(), 1);
  EXPECT_NEAR(g.unobservable_spectrum(0).real(), -3.0, 1e-12);
  EXPECT_LT(max_real_part(g.closed_loop_spectrum), 0.0);
  EXPECT_LT(g.reduced_riccati_residual, 1e-10);
}

TEST(Riccati, UndetectableIsRejected) {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A.diagonal() << -1, 0.5;
  MatrixXd C(1, 2);
  C << 1, 0;
  EXPECT_THROW(design_gain(A, C, MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), marginal()),
               DesignError);
  A(1, 1) = 0.0;
  EXPECT_THROW(design_gain(A, C, MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1)), DesignError);
  EXPECT_NO_THROW(
      design_gain(A, C, MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), marginal()));
}

TEST(Riccati, RejectsBadWeights) {
  MatrixXd A(1, 1), C(1, 1);
  A << -1;
  C << 1;
  EXPECT_THROW(design_gain(A, C, -MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1)),
               DesignError);
  EXPECT_THROW(design_gain(A, C, MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1)), DesignError);
  EXPECT_THROW(design_gain(A, C, MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1)),
               DesignError);
}

TEST(ObserverDesign, HeadingIsTheOnlyUnobservableMode) {
  const ParameterSet& p = test::nominal();
  for (double kph : {50.0, 80.0, 100.0}) {
    const LinearObserverDesign d =
        design_observer(trim_at(kph), p, Matrix14::Identity(), Matrix4::Identity(), marginal());
    EXPECT_EQ(d.observable_dim, 13);
    ASSERT_EQ(d.unobservable_spectrum.size(), 1);
    EXPECT_LT(std::abs(d.unobservable_spectrum(0)), 1e-9);
    // Every observable mode is strictly stable.
    int stable = 0;
    for (int i = 0; i < d.closed_loop_spectrum.size(); ++i) {
      if (d.closed_loop_spectrum(i).real() < -1e-6) ++stable;
    }
    EXPECT_EQ(stable, 13);
    EXPECT_LT(d.reduced_riccati_residual, 1e-6 * std::max(1.0, d.reduced_q_norm));
    EXPECT_EQ(d.C.topRows<2>(), velocity_selector() * d.A);
    EXPECT_EQ(d.C.bottomRows<2>(), rate_selector());
    // Turning the whole trajectory (heading plus the matching world-frame
    // lateral velocity) is invisible to the sensors and leaves the model at rest.
    ExtendedState z = ExtendedState::Zero();
    z(xi::psi) = 1.0;
    z(xi::vy) = kph_to_mps(kph);
    EXPECT_LT((d.C * z).norm(), 1e-6 * d.C.norm());
    EXPECT_LT((d.A * z).norm(), 1e-6 * d.A.norm());
  }
  EXPECT_THROW(design_observer(trim_at(100.0), p, Matrix14::Identity(), Matrix4::Identity()),
               DesignError);
}

TEST(ObserverDesign, HeavierMeasurementWeightShrinksGain) {
  const ParameterSet& p = test::nominal();
  for (double kph : {50.0, 80.0, 100.0}) {
    const double g1 =
        design_observer(trim_at(kph), p, Matrix14::Identity(), Matrix4::Identity(), marginal())
            .G.norm();
    const double g2 = design_observer(trim_at(kph), p, Matrix14::Identity(),
                                      2.0 * Matrix4::Identity(), marginal())
                          .G.norm();
    EXPECT_LT(g2, g1) << kph;
  }
}
