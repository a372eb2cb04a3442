#include "pucci/operators.hpp"

#include <cmath>

#include "pucci/errors.hpp"

namespace pucci {

void require_symmetric(const SymMatrix& M, double tol) {
    if (M.rows() != M.cols())
        throw NonSymmetricError("matrix is not square");
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    const double dev = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (dev > tol * scale)
        throw NonSymmetricError("matrix is not symmetric within tolerance");
}

namespace {

// Weighted eigenvalue sum with w_pos on positive and w_neg on negative
// eigenvalues; |e| < 1e-12 * ||M|| counts as zero.
double weighted_eigenvalue_sum(const SymMatrix& M, double w_pos, double w_neg) {
    require_symmetric(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const double cut = 1e-12 * std::max(M.cwiseAbs().maxCoeff(), 0.0);
    double sum = 0.0;
    for (double e : es.eigenvalues()) {
        if (e > cut)
            sum += w_pos * e;
        else if (e < -cut)
            sum += w_neg * e;
    }
    return sum;
}

double radial_quadratic_form(const SymMatrix& H, const Eigen::VectorXd& x) {
    require_symmetric(H);
    const double n2 = x.squaredNorm();
    if (n2 == 0.0)
        throw SingularPointError("Q0 is undefined at the origin");
    return x.dot(H * x) / n2;
}

}  // namespace

double pucci_plus(const SymMatrix& M, const EllipticityPair& e) {
    return weighted_eigenvalue_sum(M, e.Lambda, e.lambda);
}

double pucci_minus(const SymMatrix& M, const EllipticityPair& e) {
    return weighted_eigenvalue_sum(M, e.lambda, e.Lambda);
}

double cutoff_eta(double t) {
    if (t < 0.5) return 0.0;
    if (t >= 1.0) return 1.0;
    const double u = 2.0 * t - 1.0;
    return u * u * (3.0 - 2.0 * u);
}

SymMatrix q0_matrix(const Eigen::VectorXd& x) {
    const double n2 = x.squaredNorm();
    if (n2 == 0.0)
        throw SingularPointError("q0_matrix: x = 0 requires a cutoff");
    return x * x.transpose() / n2;
}

SymMatrix q0_matrix(const Eigen::VectorXd& x, int n_cutoff) {
    if (n_cutoff < 1)
        throw std::invalid_argument("q0_matrix: cutoff index must be >= 1");
    const double r = x.norm();
    const double eta = cutoff_eta(n_cutoff * r);
    if (eta == 0.0)
        return SymMatrix::Zero(x.size(), x.size());
    return eta / x.squaredNorm() * (x * x.transpose());
}

double q_plus_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e) {
    return e.lambda * H.trace() + (e.Lambda - e.lambda) * radial_quadratic_form(H, x);
}

double q_minus_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e) {
    return e.Lambda * H.trace() + (e.lambda - e.Lambda) * radial_quadratic_form(H, x);
}

double qn_apply(const SymMatrix& H, const Eigen::VectorXd& x, const EllipticityPair& e, int n_cutoff) {
    require_symmetric(H);
    const SymMatrix a = q0_matrix(x, n_cutoff);
    return e.lambda * H.trace() + (e.Lambda - e.lambda) * (a.array() * H.array()).sum();
}

}  // namespace pucci
