#pragma once

#include "pucci/ellipticity.hpp"
#include "pucci/radial.hpp"

namespace pucci {

/// Eigenvalue of the spherical Laplacian on the k-th harmonic: -k(k+N-2).
double sphere_eigenvalue(int k, int N);

/// Positive root of the indicial equation s(s-1) + (nt-1)s + c = 0 governing
/// the r^sigma Frobenius behaviour at the origin.  Requires c < 0 (one
/// positive root exists then); throws std::logic_error otherwise.
double indicial_exponent(double n_tilde, double c);

struct NondegReport {
    double h_at_1;
    double max_abs_h;
    bool nondegenerate;  // |h(1)| > tol * max|h|
    RadialProfile h;
};

/// Integrates the radial linearized equation
///   h'' + (nt-1)/r h' + p v^{p-1} h = 0,  h(0) = 1, h'(0) = 0
/// around a Dirichlet profile v of the DimLike equation.  Any kernel element
/// with h'(0) = 0 is proportional to this solution, so h(1) != 0 certifies a
/// trivial radial kernel.
/// The optional potential factor mu scales the zeroth-order coefficient
/// (mu = 1 is the linearization; the scan over mu exercises the detector).
NondegReport radial_nondegeneracy(const RadialProfile& v, double n_tilde, double p,
                                  double tol = 1e-6, double mu = 1.0);

enum class QForm { Plus, Minus };

/// Spherical-harmonic mode problem around the radial solution u0 of the
/// unnormalized radial equation (Lambda u'' + lambda (N-1)/r u' + u^p = 0
/// for the plus form; lambda/Lambda swapped for the minus form).
struct ModeProblem {
    int k;
    int dim;
    EllipticityPair ell;
    double p;
    RadialProfile base;  // u0, with residual <= 1e-8 against its equation
    QForm form = QForm::Plus;

    double n_tilde() const {
        return form == QForm::Plus ? dim_like_plus(dim, ell) : dim_like_minus(dim, ell);
    }
    /// Coefficient of a/r^2 in the mode equation: lambda lambda_k / Lambda
    /// for the plus form (Lambda lambda_k / lambda for minus).
    double mode_coupling() const;
    /// Denominator of the zeroth-order term: Lambda (plus) or lambda (minus).
    double potential_denominator() const {
        return form == QForm::Plus ? ell.Lambda : ell.lambda;
    }
};

struct ModeReport {
    double a_at_1;
    double max_abs_a;
    double sigma;        // indicial exponent used for the start
    bool nondegenerate;  // |a(1)| > tol * max|a|
    RadialProfile mode;  // a_k and a_k'
};

/// Integrates the k-th mode equation
///   a'' + (nt-1)/r a' + coupling * a/r^2 + (p/denom) u0^{p-1} a = 0
/// from the indicial start a ~ r^sigma at r0 = 1e-6 to r = 1.  The indicial
/// solution spans all candidates vanishing at the origin (Frobenius), so
/// a(1) != 0 certifies the mode kernel is trivial.  Requires k >= 1.
ModeReport mode_nondegeneracy(const ModeProblem& mp, double tol = 1e-6);

struct SturmReport {
    bool ok;
    double w_residual;      // sup-norm residual of w = u0' in its equation
    double identity_drift;  // relative drift of the Wronskian-type invariant
    double integration_end; // first zero of a_k if one exists, else 1
};

/// Numerical verification of the two ingredients of the Sturm comparison
/// argument: w = u0' satisfies its own mode-type equation, and the quantity
///   r^{nt-1} W(r) + int_r0^r [coupling + (nt-1)] t^{nt-3} a w dt,
/// W = a' w - a w', is constant along the grid (the integrated form of the
/// identity obtained by cross-multiplying the two equations).
SturmReport sturm_cross_check(const ModeProblem& mp);

/// Radial base solution u0 of the Q+ (or Q-) equation on the unit ball,
/// built from the DimLike Dirichlet profile by the exact operator scaling.
RadialProfile q_radial_base_solution(int N, const EllipticityPair& e, double p,
                                     QForm form = QForm::Plus, int grid_points = 4097);

}  // namespace pucci
