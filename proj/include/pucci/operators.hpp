#pragma once

#include <optional>

#include <Eigen/Dense>

#include "pucci/ellipticity.hpp"

namespace pucci {

/// Dense symmetric matrix; symmetry is a runtime precondition of the
/// operator evaluations (checked to 1e-12 relative).
using SymMatrix = Eigen::MatrixXd;

/// Throws NonSymmetricError if M deviates from its transpose by more than
/// tol * ||M||_inf.
void require_symmetric(const SymMatrix& M, double tol = 1e-12);

/// Pucci maximal operator: Lambda * sum of positive eigenvalues
/// + lambda * sum of negative eigenvalues. Eigenvalues below
/// 1e-12 * ||M|| in magnitude count as zero.
double pucci_plus(const SymMatrix& M, const EllipticityPair& e);

/// Pucci minimal operator: lambda on positive, Lambda on negative eigenvalues.
double pucci_minus(const SymMatrix& M, const EllipticityPair& e);

/// C1 cutoff: 0 for t < 1/2, 1 for t >= 1, cubic Hermite blend in between.
double cutoff_eta(double t);

/// Coefficient matrix of Q0, a_ij = x_i x_j / |x|^2.  Rank one, trace one.
/// Throws SingularPointError at x = 0.
SymMatrix q0_matrix(const Eigen::VectorXd& x);

/// Smoothed coefficients a^n_ij = eta(n|x|) x_i x_j / |x|^2; identical to the
/// uncut matrix for |x| >= 1/n and zero for |x| < 1/(2n) (in particular at 0).
SymMatrix q0_matrix(const Eigen::VectorXd& x, int n_cutoff);

/// Q+ applied to a Hessian H at the point x:
/// lambda * tr(H) + (Lambda - lambda) * x^T H x / |x|^2.
double q_plus_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e);

/// Q- (lambda and Lambda swapped): Lambda * tr(H) + (lambda - Lambda) * x^T H x / |x|^2.
double q_minus_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e);

/// Approximating operator Q^n: lambda * tr(H) + (Lambda - lambda) * sum a^n_ij H_ij.
double qn_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e, int n_cutoff);

}  // namespace pucci
