#include "motobs/estimator/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "motobs/error.hpp"

namespace motobs {

namespace {

double inf_norm(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

MatrixXd symmetrize(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

}  // namespace

Eigen::VectorXd balancing_scale(const MatrixXd& A, const MatrixXd& C) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  MatrixXd M = A;
  constexpr double kRadix = 2.0;
  bool converged = false;
  for (int sweep = 0; sweep < 200 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(M(j, i));
        row += std::abs(M(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / kRadix;
      double f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= kRadix;
        col *= kRadix * kRadix;
      }
      g = row * kRadix;
      while (col > g) {
        f /= kRadix;
        col /= kRadix * kRadix;
      }
      if ((col + row) / f < 0.95 * s) {
        converged = false;
        d(i) *= f;
        M.col(i) *= f;
        M.row(i) /= f;
      }
    }
  }
  (void)C;
  return d;
}

ObservabilitySplit observability_staircase(const MatrixXd& A, const MatrixXd& C, double tol) {
  const Eigen::Index n = A.rows();
  const double scale = std::max({inf_norm(A), inf_norm(C), 1e-300});
  const double threshold = tol * scale;

  MatrixXd basis(n, 0);
  MatrixXd block = C.transpose();
  while (basis.cols() < n && block.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) block -= basis * (basis.transpose() * block);
    }
    Eigen::JacobiSVD<MatrixXd> svd(block, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < sv.size() && sv(keep) > threshold && basis.cols() + keep < n) ++keep;
    if (keep == 0) break;
    const MatrixXd fresh = svd.matrixU().leftCols(keep);
    MatrixXd grown(n, basis.cols() + keep);
    grown << basis, fresh;
    basis = grown;
    block = A.transpose() * fresh;
  }

  ObservabilitySplit split;
  split.observable_dim = static_cast<int>(basis.cols());
  split.observable = basis;
  if (basis.cols() == n) {
    split.unobservable = MatrixXd(n, 0);
  } else if (basis.cols() == 0) {
    split.unobservable = MatrixXd::Identity(n, n);
  } else {
    Eigen::HouseholderQR<MatrixXd> qr(basis);
    const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
    split.unobservable = Q.rightCols(n - basis.cols());
  }
  return split;
}

VectorXcd eigenvalues(const MatrixXd& A) {
  if (A.rows() == 0) return VectorXcd(0);
  Eigen::EigenSolver<MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  return es.eigenvalues();
}

double max_real_part(const VectorXcd& ev) {
  if (ev.size() == 0) return -std::numeric_limits<double>::infinity();
  return ev.real().maxCoeff();
}

MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& W) {
  const Eigen::Index n = F.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd K(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // kron(I, F) + kron(F, I)
      K.block(i * n, j * n, n, n) = I(i, j) * F + F(i, j) * I;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(W.data(), n * n);
  Eigen::PartialPivLU<MatrixXd> lu(K);
  Eigen::VectorXd x = lu.solve(rhs);
  MatrixXd X = Eigen::Map<MatrixXd>(x.data(), n, n);
  return symmetrize(X);
}

double filter_riccati_residual(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q,
                               const MatrixXd& R, const MatrixXd& P) {
  const MatrixXd S = C.transpose() * R.ldlt().solve(C);
  return inf_norm(A * P + P * A.transpose() - P * S * P + Q);
}

namespace {

// Stabilizing solution from the stable invariant subspace of the Hamiltonian.
// Returns false when the eigen-decomposition does not split cleanly.
bool hamiltonian_solution(const MatrixXd& A, const MatrixXd& S, const MatrixXd& Q,
                          MatrixXd& P) {
  const Eigen::Index n = A.rows();
  MatrixXd H(2 * n, 2 * n);
  H << A.transpose(), -S, -Q, -A;
  Eigen::ComplexEigenSolver<MatrixXd> ces(H);
  if (ces.info() != Eigen::Success) return false;
  Eigen::MatrixXcd stable(2 * n, n);
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    if (ces.eigenvalues()(k).real() < 0.0) {
      if (count == n) return false;
      stable.col(count++) = ces.eigenvectors().col(k);
    }
  }
  if (count != n) return false;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(stable.topRows(n));
  if (!lu.isInvertible()) return false;
  P = symmetrize((stable.bottomRows(n) * lu.inverse()).real());
  return P.allFinite() && max_real_part(eigenvalues(A - P * S)) < 0.0;
}

// Gain L with A - L C Hurwitz by the shifted-Lyapunov construction: with
// (A^T + bI) Z + Z (A^T + bI)^T = 2 C^T C, L = Z^-1 C^T places every
// eigenvalue of A - L C on Re = -b.
bool bass_gain(const MatrixXd& A, const MatrixXd& C, MatrixXd& L) {
  const Eigen::Index n = A.rows();
  const double shift = std::max(1.0, max_real_part(eigenvalues(-A))) * 1.5;
  const MatrixXd F = -(A.transpose() + shift * MatrixXd::Identity(n, n));
  const MatrixXd Z = solve_lyapunov(F, 2.0 * C.transpose() * C);
  Eigen::LDLT<MatrixXd> ldlt(Z);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  L = ldlt.solve(C.transpose());
  return L.allFinite() && max_real_part(eigenvalues(A - L * C)) < 0.0;
}

}  // namespace

MatrixXd solve_filter_riccati(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q,
                              const MatrixXd& R) {
  const Eigen::Index n = A.rows();
  if (n == 0) return MatrixXd(0, 0);
  Eigen::LDLT<MatrixXd> Rldlt(R);
  if (Rldlt.info() != Eigen::Success || !Rldlt.isPositive()) {
    throw DesignError("measurement weight R_w must be positive definite");
  }
  const MatrixXd Rinv = Rldlt.solve(MatrixXd::Identity(R.rows(), R.cols()));
  const MatrixXd S = symmetrize(C.transpose() * Rinv * C);
  const double q_scale = std::max(inf_norm(Q), 1e-300);

  // Starting point for Newton-Kleinman: the direct Hamiltonian solution when
  // it is clean, otherwise any stabilizing gain.
  MatrixXd P;
  MatrixXd L;
  if (hamiltonian_solution(A, S, Q, P)) {
    L = P * C.transpose() * Rinv;
  } else if (max_real_part(eigenvalues(A)) < 0.0) {
    L = MatrixXd::Zero(n, C.rows());
  } else {
    MatrixXd P_aux;
    if (hamiltonian_solution(A, S, MatrixXd::Identity(n, n), P_aux)) {
      L = P_aux * C.transpose() * Rinv;
    } else if (!bass_gain(A, C, L)) {
      throw DesignError("no stabilizing observer gain found to start the Riccati iteration");
    }
  }

  MatrixXd best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const MatrixXd F = A - L * C;
    if (max_real_part(eigenvalues(F)) >= 0.0) break;
    const MatrixXd next = solve_lyapunov(F, Q + L * R * L.transpose());
    if (!next.allFinite()) break;
    const double res = filter_riccati_residual(A, C, Q, R, next);
    L = next * C.transpose() * Rinv;
    if (res < best_res) {
      const bool stalled = res > 0.5 * best_res && best_res < 1e-10 * q_scale;
      best_res = res;
      best = next;
      if (stalled || res < 1e-15 * q_scale) break;
    } else if (best_res < 1e-8 * q_scale) {
      break;
    }
  }
  if (best.size() == 0 || !best.allFinite() ||
      max_real_part(eigenvalues(A - best * S)) >= 0.0) {
    throw DesignError("filter Riccati iteration did not produce a stabilizing solution");
  }
  if (!(best_res < 1e-6 * q_scale)) {
    std::ostringstream os;
    os << "filter Riccati iteration did not converge (residual " << best_res
       << ", weight norm " << q_scale << ")";
    throw DesignError(os.str());
  }
  return best;
}

GainDesign design_gain(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q_w,
                       const MatrixXd& R_w, const GainOptions& options) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || C.cols() != n || Q_w.rows() != n || Q_w.cols() != n ||
      R_w.rows() != C.rows() || R_w.cols() != C.rows()) {
    throw DesignError("observer design matrices have inconsistent dimensions");
  }
  if (!A.allFinite() || !C.allFinite() || !Q_w.allFinite() || !R_w.allFinite()) {
    throw DesignError("observer design matrices contain non-finite entries");
  }
  if ((Q_w - Q_w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, inf_norm(Q_w))) {
    throw DesignError("process weight Q_w must be symmetric");
  }
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(Q_w));
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, inf_norm(Q_w))) {
      throw DesignError("process weight Q_w must be positive semidefinite");
    }
  }
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(R_w));
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw DesignError("measurement weight R_w must be positive definite");
    }
  }

  GainDesign out;
  const double a_norm = std::max(1.0, inf_norm(A));
  out.stability_threshold = -options.stability_margin * a_norm;

  // Balanced coordinates x = D z.
  const Eigen::VectorXd d = balancing_scale(A, C);
  const MatrixXd Ab = d.cwiseInverse().asDiagonal() * A * d.asDiagonal();
  const MatrixXd Cb = C * d.asDiagonal();
  const MatrixXd Qb = d.cwiseInverse().asDiagonal() * Q_w * d.cwiseInverse().asDiagonal();

  const ObservabilitySplit split = observability_staircase(Ab, Cb);
  out.observable_dim = split.observable_dim;
  const MatrixXd& To = split.observable;
  const MatrixXd& Tu = split.unobservable;

  out.unobservable_spectrum = eigenvalues(Tu.transpose() * Ab * Tu);
  for (Eigen::Index k = 0; k < out.unobservable_spectrum.size(); ++k) {
    const double re = out.unobservable_spectrum(k).real();
    const bool strictly_stable = re < out.stability_threshold;
    const bool marginal = re <= -out.stability_threshold;
    if (strictly_stable) continue;
    if (options.allow_marginal_unobservable && marginal) continue;
    std::ostringstream os;
    os << "pair (A, C) is not detectable: unobservable eigenvalue "
       << out.unobservable_spectrum(k).real() << (out.unobservable_spectrum(k).imag() < 0 ? "" : "+")
       << out.unobservable_spectrum(k).imag() << "i (stability threshold "
       << out.stability_threshold << ")";
    throw DesignError(os.str());
  }

  const MatrixXd Ao = To.transpose() * Ab * To;
  const MatrixXd Co = Cb * To;
  const MatrixXd Qo = symmetrize(To.transpose() * Qb * To);
  out.reduced_q_norm = inf_norm(Qo);
  const MatrixXd Po = solve_filter_riccati(Ao, Co, Qo, R_w);
  out.reduced_riccati_residual = filter_riccati_residual(Ao, Co, Qo, R_w, Po);

  const MatrixXd Pb = To * Po * To.transpose();
  const MatrixXd Gb = Pb * Cb.transpose() * R_w.ldlt().solve(MatrixXd::Identity(R_w.rows(), R_w.cols()));
  out.P = symmetrize(d.asDiagonal() * Pb * d.asDiagonal());
  out.G = d.asDiagonal() * Gb;
  out.riccati_residual = filter_riccati_residual(A, C, Q_w, R_w, out.P);
  out.closed_loop_spectrum = eigenvalues(Ab - Gb * Cb);

  const double worst = max_real_part(out.closed_loop_spectrum);
  const double allowed =
      options.allow_marginal_unobservable ? -out.stability_threshold : out.stability_threshold;
  if (!(worst < allowed) && !(options.allow_marginal_unobservable && worst <= allowed)) {
    std::ostringstream os;
    os << "observer error dynamics are not stable (max real part " << worst << ")";
    throw DesignError(os.str());
  }
  return out;
}

}  // namespace motobs
