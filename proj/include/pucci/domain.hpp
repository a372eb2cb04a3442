#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pucci/ellipticity.hpp"
#include "pucci/radial.hpp"

namespace pucci {

enum class ShapeKind { Cos2, Cos3, Bump };

ShapeKind shape_from_name(const std::string& name);
std::string shape_name(ShapeKind s);

/// Axisymmetric perturbation of the unit ball: boundary radius
/// rho(theta) = 1 + epsilon * g(theta), theta the polar angle in [0, pi].
struct PerturbedBall {
    int dim = 3;  // ambient dimension N >= 3
    double epsilon = 0.0;
    ShapeKind shape = ShapeKind::Cos2;
    std::string description;

    PerturbedBall() = default;
    PerturbedBall(int N, double eps, ShapeKind s);

    double shape_g(double theta) const;
    double shape_dg(double theta) const;
    double shape_d2g(double theta) const;

    double rho(double theta) const { return 1.0 + epsilon * shape_g(theta); }
    double drho(double theta) const { return epsilon * shape_dg(theta); }
    double d2rho(double theta) const { return epsilon * shape_d2g(theta); }
};

/// Boundary-fitted meridian grid in mapped coordinates s = r / rho(theta).
/// Interior nodes are cell centers s_i = (i + 1/2)/nr, theta_j =
/// (j + 1/2) pi/ntheta; the Dirichlet ring lives at s = 1 as explicit
/// unknowns with identity rows.  The polar axis and the origin carry no
/// nodes; symmetry ghosts (mirror in theta, antipodal through the origin)
/// close the stencils there.
struct MeridianGrid {
    PerturbedBall dom;
    int nr = 0;
    int ntheta = 0;
    double hs = 0.0;
    double htheta = 0.0;
    std::vector<double> s;             // cell centers, size nr
    std::vector<double> theta;         // cell centers, size ntheta
    std::vector<double> rho, drho, d2rho, cot;  // per theta column
    double min_jacobian = 0.0;         // min over cells of s * rho^2

    int interior_count() const { return nr * ntheta; }
    int total_count() const { return (nr + 1) * ntheta; }
    int index(int i, int j) const { return i * ntheta + j; }       // i < nr
    int boundary_index(int j) const { return nr * ntheta + j; }
    double radius(int i, int j) const { return s[i] * rho[j]; }    // physical r
};

/// Builds and validates the grid.  Throws GridFailure when the boundary map
/// degenerates (rho too small) or the fitted coordinates are too skewed
/// (|rho'|/rho above 10, a documented quality bound).
MeridianGrid build_grid(const PerturbedBall& dom, int nr, int ntheta);

using SparseMat = Eigen::SparseMatrix<double>;

/// Anisotropic axisymmetric second-order operator
///   c_rr H_rr + 2 c_rt H_rt + c_tt H_tt + c_az * mu
/// in the orthonormal frame (radial, meridian-tangential, azimuthal), where
/// H_* are the frame Hessian entries of u and mu = u_r/r + cot(theta) u_t/r^2
/// is the azimuthal Hessian eigenvalue.  Coefficients per interior node.
struct FrameWeights {
    Eigen::VectorXd c_rr, c_rt, c_tt, c_az;  // size interior_count()
};

/// Assembles the operator matrix; boundary rows are identity (Dirichlet).
SparseMat assemble_operator(const MeridianGrid& g, const FrameWeights& w);

/// Q+ = lambda Laplacian + (Lambda - lambda) d^2/dr^2 in mapped coordinates.
SparseMat discretize_q_plus(const MeridianGrid& g, const EllipticityPair& e, int N);

enum class PucciSide { Plus, Minus };

/// Pointwise M+/M- of the finite-difference Hessian of an axisymmetric grid
/// function: meridian 2x2 eigenvalues plus the azimuthal eigenvalue with
/// multiplicity N-2, weighted per the extremal operator.  Boundary entries 0.
Eigen::VectorXd pucci_fd_apply(const Eigen::VectorXd& u, const MeridianGrid& g,
                               const EllipticityPair& e, int N,
                               PucciSide side = PucciSide::Plus);

/// Frame Hessian entries of u at an interior node (diagnostic / test hook).
struct FrameHessian {
    double h_rr, h_rt, h_tt, mu;
};
FrameHessian frame_hessian_at(const Eigen::VectorXd& u, const MeridianGrid& g,
                              int i, int j);

enum class SemilinearKind { QPlus, PucciPlus };

struct DiscreteSolution {
    MeridianGrid grid;
    Eigen::VectorXd values;    // interior + boundary ring layout
    double residual_norm = 0.0;
    int newton_iters = 0;
};

/// Newton continuation for L u + (u_+)^p = 0 with Dirichlet data 0.  For
/// PucciPlus the operator is re-linearized each step by freezing the optimal
/// diffusion coefficients (policy iteration interleaved with Newton); the
/// reported residual is always the genuine nonlinear one.
/// Throws NewtonDivergence (residual growth over 5 steps or iteration cap)
/// and PositivityFailure (converged iterate not strictly positive inside).
DiscreteSolution solve_semilinear(const MeridianGrid& grid, SemilinearKind kind,
                                  const EllipticityPair& e, double p,
                                  const Eigen::VectorXd& init, double tol);

/// Radial seed transplanted through the mapped radial coordinate.
Eigen::VectorXd seed_from_profile(const MeridianGrid& grid, const RadialProfile& u0);

/// Max-norm distance to the radial baseline in mapped coordinates.
double delta_vs_radial(const DiscreteSolution& sol, const RadialProfile& u0);

struct ContinuationResult {
    std::vector<double> eps;
    std::vector<DiscreteSolution> solutions;
    std::vector<double> deltas;   // ||u_eps - u0||_inf per eps
    bool deltas_decreasing = false;
    RadialProfile baseline;
};

/// Solves on a family of perturbed balls with amplitudes eps_list (front to
/// back), seeding each solve from the previous solution.  Solver errors
/// propagate annotated with the failing epsilon.
ContinuationResult continuation_in_epsilon(int N, ShapeKind shape, SemilinearKind kind,
                                           const EllipticityPair& e, double p,
                                           const std::vector<double>& eps_list,
                                           int nr, int ntheta, double tol);

struct HomotopyStep {
    double s;
    double q;         // exponent used at this step
    double p_star_s;  // critical exponent of M+_{s,Lambda}
    double residual;
    int iters;
};

struct HomotopyResult {
    DiscreteSolution final;
    std::vector<HomotopyStep> path;
};

/// Marches the ellipticity parameter s from Lambda (Laplacian case) down to
/// lambda, solving M+_{s,Lambda} u + u^{q(s)} = 0 on the domain at each step
/// with the previous solution as seed; q(s) = min(p_target, 0.95 p*_+(s)) and
/// q(lambda) = p_target.  Requires p_target < p*_+(lambda).
HomotopyResult homotopy_in_s(const EllipticityPair& e, int N, double p_target,
                             const PerturbedBall& dom, int steps, int nr, int ntheta,
                             double tol);

}  // namespace pucci
