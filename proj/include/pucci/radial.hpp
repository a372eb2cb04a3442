#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pucci/ellipticity.hpp"

namespace pucci {

enum class RadialKind { DimLike, PucciPlus, PucciMinus };

/// Radial semilinear problem L u + (u_+)^p = 0 on [0, R), u'(0) = 0.
/// DimLike is the normalized form v'' + (Ntilde-1)/r v' + v^p = 0 covering
/// Q+/Q- after scaling; the Pucci kinds keep the piecewise regime structure.
struct RadialProblem {
    RadialKind kind;
    double n_tilde;       // DimLike only
    int dim;              // Pucci kinds
    EllipticityPair ell;  // Pucci kinds
    double p;

    static RadialProblem dim_like(double n_tilde, double p);
    static RadialProblem pucci_plus(int N, const EllipticityPair& e, double p);
    static RadialProblem pucci_minus(int N, const EllipticityPair& e, double p);

    /// Effective denominator of the series start: u''(0) = -u(0)^p / d.
    double series_denominator() const;
    std::string describe() const;
};

/// Second derivative of the DimLike equation: v'' = -(Nt-1)/r dv - (v_+)^p.
double rhs_dimlike(double r, double v, double dv, double n_tilde, double p);

/// Second derivative for M+: solves phi(u'') + (N-1) phi(du/r) + (u_+)^p = 0
/// with phi(s) = Lambda s for s >= 0, lambda s for s < 0.
double rhs_pucci_plus(double r, double u, double du, int N, const EllipticityPair& e, double p);

/// Second derivative for M- (phi with lambda/Lambda swapped).
double rhs_pucci_minus(double r, double u, double du, int N, const EllipticityPair& e, double p);

/// Dispatch on problem kind.
double radial_rhs(const RadialProblem& prob, double r, double v, double dv);

/// Radial solution samples: v and v' on an increasing grid starting at r = 0.
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> derivs;

    std::size_t size() const { return radii.size(); }
    double r_max() const { return radii.empty() ? 0.0 : radii.back(); }
    double max_abs_value() const;

    /// Cubic Hermite interpolation (clamped to the grid range).
    double value_at(double r) const;
    double deriv_at(double r) const;

  private:
    std::size_t locate(double r) const;
};

struct ShootOutcome {
    enum class Kind { Crossing, Positive } kind;
    double first_zero = 0.0;  // Crossing: refined location of v = 0
    double horizon = 0.0;     // Positive: the integration horizon reached
    RadialProfile profile;

    bool crossed() const { return kind == Kind::Crossing; }
};

/// Integrates from the origin (series start at r0 = 1e-8) with initial
/// height v0 until the first sign change or r = rmax.  Local error <= tol;
/// the first zero is refined to relative accuracy well below tol.
ShootOutcome shoot(const RadialProblem& prob, double v0, double rmax = 50.0,
                   double tol = 1e-10);

enum class TrajectoryClass { Crossing, Positive };

struct ClassifyParams {
    double r_switch = 50.0;  // plain radial integration up to here
    double t_max = 60.0;     // then Emden-Fowler time horizon (t = log r)
    double tol = 1e-12;
};

struct Classification {
    TrajectoryClass cls;
    double log_first_zero = 0.0;  // Crossing: log of the zero radius
};

/// Robust crossing/positive dichotomy: radial integration to r_switch, then
/// continuation of the same trajectory in Emden-Fowler variables
/// x(t) = r^{2/(p-1)} v(r), t = log r, where near-critical trajectories stay
/// O(1) instead of underflowing.  Crossings of v and of x coincide.
Classification classify_trajectory(const RadialProblem& prob, double v0,
                                   const ClassifyParams& cp = {});

/// Unique positive Dirichlet solution on the unit ball (Theorem-2.1 regime),
/// obtained from the v0 = 1 shot rescaled through the scaling family so the
/// first zero lands at r = 1; sampled on a uniform grid.
/// Throws SupercriticalError when the trajectory never crosses.
RadialProfile dirichlet_radial_solution(const RadialProblem& prob,
                                        int grid_points = 4097, double tol = 1e-13);

/// Sup-norm residual of the ODE on the stored grid, with v'' reconstructed
/// from the sampled derivatives by 4th-order central differences (an
/// implementation-independent validation of the profile).  Normalized by
/// max(1, sup |v''|) so the figure is meaningful for steep profiles.
double profile_ode_residual(const RadialProfile& prof, const RadialProblem& prob);

struct ExponentResult {
    double p_star;
    int bisection_steps;
    // classification scan over a p-grid across the initial bracket;
    // guards the monotonicity assumption behind the bisection
    std::vector<std::pair<double, TrajectoryClass>> scan;
    bool scan_monotone;
};

/// Bisection in p for the threshold between crossing (subcritical) and
/// positive (supercritical) trajectories, shot with v0 = 1.  The bracket
/// must classify as (Crossing, Positive); otherwise InvalidBracketError.
ExponentResult critical_exponent(const RadialProblem& family, double p_lo, double p_hi,
                                 double tol = 1e-3, const ClassifyParams& cp = {},
                                 int scan_points = 9);

}  // namespace pucci
