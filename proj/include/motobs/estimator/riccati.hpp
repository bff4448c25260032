#pragma once

#include <vector>

#include <Eigen/Dense>

namespace motobs {

using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// Exact power-of-two diagonal scaling `D` such that `D^-1 A D` has
/// comparable row and column norms (LAPACK gebal style, no permutation).
Eigen::VectorXd balancing_scale(const MatrixXd& A, const MatrixXd& C);

/// Orthonormal bases of the observable subspace (Krylov space of A^T on C^T)
/// and its orthogonal complement, built one staircase block at a time.
struct ObservabilitySplit {
  MatrixXd observable;    // n x n_o
  MatrixXd unobservable;  // n x (n - n_o)
  int observable_dim = 0;
};

/// `tol` is relative: a new direction is kept when its singular value exceeds
/// tol * max(||A||, ||C||).
ObservabilitySplit observability_staircase(const MatrixXd& A, const MatrixXd& C,
                                           double tol = 1e-10);

/// Stabilizing solution of A P + P A^T - P C^T R^-1 C P + Q = 0. Hamiltonian
/// eigenvectors seed a Newton-Kleinman refinement. Throws DesignError when no
/// stabilizing solution is found.
MatrixXd solve_filter_riccati(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q,
                              const MatrixXd& R);

/// ||A P + P A^T - P C^T R^-1 C P + Q||_inf.
double filter_riccati_residual(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q,
                               const MatrixXd& R, const MatrixXd& P);

/// Solves F X + X F^T = -W by Kronecker expansion (small systems only).
MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& W);

double max_real_part(const VectorXcd& eigenvalues);
VectorXcd eigenvalues(const MatrixXd& A);

struct GainOptions {
  /// Eigenvalues with real part above -margin * max(1, ||A||_inf) count as not
  /// strictly stable.
  double stability_margin = 1e-12;
  /// Accept unobservable modes that sit on the imaginary axis within the
  /// margin (for example the heading angle, which no inertial measurement
  /// can fix). Their eigenvalues stay in the closed-loop spectrum.
  bool allow_marginal_unobservable = false;
};

struct GainDesign {
  MatrixXd G;                      // n x p
  MatrixXd P;                      // n x n, zero on the unobservable subspace
  VectorXcd closed_loop_spectrum;  // eig(A - G C)
  VectorXcd unobservable_spectrum;
  int observable_dim = 0;
  /// Residual of the full n x n Riccati equation with Q_w.
  double riccati_residual = 0.0;
  /// Residual of the Riccati equation restricted to the observable subspace.
  double reduced_riccati_residual = 0.0;
  double reduced_q_norm = 0.0;
  double stability_threshold = 0.0;  // absolute, -margin * max(1, ||A||)
};

/// LQR-dual observer gain G = P C^T R^-1. The filter Riccati equation is
/// solved on the observable subspace of the balanced system; unobservable
/// modes must be strictly stable (or, with allow_marginal_unobservable,
/// marginal). Throws DesignError on a detectability or Riccati failure.
GainDesign design_gain(const MatrixXd& A, const MatrixXd& C, const MatrixXd& Q_w,
                       const MatrixXd& R_w, const GainOptions& options = {});

}  // namespace motobs
