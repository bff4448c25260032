#include "motobs/estimator/linearize.hpp"

#include <cmath>
#include <sstream>

#include "motobs/error.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

namespace {

constexpr double kRelativeStep = 1e-6;
constexpr double kHalfStepAgreement = 1e-4;

template <typename Perturb>
Vector14 central_column(Perturb&& rhs_at, double step) {
  return (rhs_at(step) - rhs_at(-step)) / (2.0 * step);
}

void check_column(const Vector14& full, const Vector14& half, const char* what, int j) {
  const double scale = std::max(full.cwiseAbs().maxCoeff(), 1e-6);
  const double dev = (full - half).cwiseAbs().maxCoeff();
  if (!(dev <= kHalfStepAgreement * scale)) {
    std::ostringstream os;
    os << "linearization column " << what << "[" << j
       << "] fails the half-step check (deviation " << dev << ", scale " << scale << ")";
    throw NumericError(os.str());
  }
}

}  // namespace

LinearModel linearize(const TrimPoint& tp, const ParameterSet& p) {
  LinearModel lm;
  const ExtendedState& X0 = tp.X_star;
  const InputVector& u0 = tp.u_star;

  for (int j = 0; j < 14; ++j) {
    const double hstep = kRelativeStep * std::max(1.0, std::abs(X0(j)));
    auto rhs_at = [&](double d) {
      ExtendedState X = X0;
      X(j) += d;
      return extended_rhs(X, u0, p);
    };
    const Vector14 full = central_column(rhs_at, hstep);
    const Vector14 half = central_column(rhs_at, 0.5 * hstep);
    check_column(full, half, "A", j);
    lm.A.col(j) = full;
  }
  for (int j = 0; j < 4; ++j) {
    const double hstep = kRelativeStep * std::max(1.0, std::abs(u0(j)));
    auto rhs_at = [&](double d) {
      InputVector u = u0;
      u(j) += d;
      return extended_rhs(X0, u, p);
    };
    const Vector14 full = central_column(rhs_at, hstep);
    const Vector14 half = central_column(rhs_at, 0.5 * hstep);
    check_column(full, half, "B", j);
    lm.B.col(j) = full;
  }
  return lm;
}

}  // namespace motobs
