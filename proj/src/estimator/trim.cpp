#include "motobs/estimator/trim.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "motobs/error.hpp"
#include "motobs/multibody/multibody.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

namespace {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

// Unknowns and the h-rows they balance.
constexpr std::array<int, 4> kStateUnknowns = {xi::dtheta_f, xi::dtheta_r, xi::Ffx,
                                               xi::Frx};
constexpr std::array<int, 5> kResidualRows = {xi::vx, xi::dtheta_f, xi::dtheta_r,
                                              xi::Ffx, xi::Frx};

struct Candidate {
  ExtendedState X;
  InputVector u;
};

Candidate assemble(double v, const Vector5& z) {
  Candidate c{ExtendedState::Zero(), InputVector::Zero()};
  c.X(xi::vx) = v;
  for (std::size_t i = 0; i < kStateUnknowns.size(); ++i) c.X(kStateUnknowns[i]) = z(i);
  c.u(ui::tau_D) = z(4);
  return c;
}

Vector5 reduced_residual(double v, const Vector5& z, const ParameterSet& p) {
  const Candidate c = assemble(v, z);
  const ExtendedState h = extended_rhs(c.X, c.u, p);
  Vector5 r;
  for (std::size_t i = 0; i < kResidualRows.size(); ++i) r(i) = h(kResidualRows[i]);
  return r;
}

}  // namespace

TrimPoint find_trim(double v_target, const ParameterSet& p, int max_iterations) {
  if (!(v_target >= kTrimMinSpeed && v_target <= kTrimMaxSpeed)) {
    std::ostringstream os;
    os << "trim speed " << v_target << " m/s outside [" << kTrimMinSpeed << ", "
       << kTrimMaxSpeed << "]";
    throw TrimError(os.str());
  }

  // No-slip seed: wheels roll at v/R, rear force balances drag.
  const double drag = -drag_force(v_target, p);
  Vector5 z;
  z << v_target / p.R_f, v_target / p.R_r, 0.0, drag, p.R_r * drag;

  TrimPoint tp;
  std::ostringstream log;
  for (int it = 0; it <= max_iterations; ++it) {
    const Candidate c = assemble(v_target, z);
    const double norm = extended_rhs(c.X, c.u, p).cwiseAbs().maxCoeff();
    tp.residual_history.push_back(norm);
    log << "  iter " << it << ": ||h||_inf = " << norm << "\n";
    // Keep polishing a few steps below tolerance; stop when Newton stalls.
    const bool converged = norm < kTrimTolerance;
    const bool stalled = it > 0 && norm >= tp.residual_history[it - 1] * 0.5;
    if (converged && (stalled || norm == 0.0 || it == max_iterations)) {
      tp.X_star = c.X;
      tp.u_star = c.u;
      tp.residual_norm = norm;
      tp.iterations = it;
      return tp;
    }
    if (it == max_iterations) break;

    const Vector5 r = reduced_residual(v_target, z, p);
    Matrix5 J;
    for (int j = 0; j < 5; ++j) {
      const double hstep = 1e-6 * std::max(1.0, std::abs(z(j)));
      Vector5 zp = z, zm = z;
      zp(j) += hstep;
      zm(j) -= hstep;
      J.col(j) = (reduced_residual(v_target, zp, p) - reduced_residual(v_target, zm, p)) /
                 (2.0 * hstep);
    }
    const Eigen::FullPivLU<Matrix5> lu(J);
    if (!lu.isInvertible()) throw TrimError("trim Jacobian is singular\n" + log.str());
    z -= lu.solve(r);
    if (!z.allFinite()) throw TrimError("trim iteration diverged\n" + log.str());
  }
  throw TrimError("trim did not converge in " + std::to_string(max_iterations) +
                  " iterations\n" + log.str());
}

}  // namespace motobs
