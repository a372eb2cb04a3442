#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "pucci/errors.hpp"
#include "pucci/operators.hpp"

using namespace pucci;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
MatrixXd diag2(double a, double b) {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}
}  // namespace

TEST_CASE("ellipticity pair validation and dimension-like numbers") {
    CHECK_THROWS_AS(EllipticityPair(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EllipticityPair(2.0, 1.0), std::invalid_argument);
    EllipticityPair e(1.0, 2.0);
    CHECK(dim_like_plus(5, e) == doctest::Approx(3.0));
    CHECK(dim_like_minus(4, e) == doctest::Approx(7.0));
    // Ntilde+ <= N <= Ntilde- for any admissible pair
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.1, 3.0), fac(1.0, 5.0);
    for (int it = 0; it < 100; ++it) {
        const double l = lam(rng);
        EllipticityPair ee(l, l * fac(rng));
        for (int N = 2; N <= 6; ++N) {
            CHECK(dim_like_plus(N, ee) <= N + 1e-14);
            CHECK(dim_like_minus(N, ee) >= N - 1e-14);
            CHECK(dim_like_plus(N, ee) > 1.0);
        }
    }
}

TEST_CASE("pucci_plus on diagonal matrices") {
    EllipticityPair e(1.0, 2.0);
    CHECK(pucci_plus(diag2(1.0, 1.0), e) == doctest::Approx(4.0));
    CHECK(pucci_plus(diag2(2.0, -3.0), e) == doctest::Approx(1.0));
    CHECK(pucci_minus(diag2(1.0, 1.0), e) == doctest::Approx(2.0));
    CHECK(pucci_minus(diag2(2.0, -3.0), e) == doctest::Approx(-4.0));
}

TEST_CASE("pucci_plus equals brute force over eigenbasis sign assignments") {
    EllipticityPair e(1.0, 2.0);
    std::mt19937_64 rng(42);
    for (int it = 0; it < 200; ++it) {
        const MatrixXd M = oracle::random_symmetric(rng, 3);
        CHECK(pucci_plus(M, e) ==
              doctest::Approx(oracle::pucci_plus_bruteforce(M, e)).epsilon(1e-12));
    }
}

TEST_CASE("non-symmetric input is rejected") {
    EllipticityPair e(1.0, 2.0);
    MatrixXd M(2, 2);
    M << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(pucci_plus(M, e), NonSymmetricError);
    CHECK_THROWS_AS(q_plus_apply(M, VectorXd::Ones(2), e), NonSymmetricError);
}

TEST_CASE("sandwich property against random admissible diffusions") {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> dim(2, 4);
    EllipticityPair e(0.7, 2.5);
    for (int it = 0; it < 1000; ++it) {
        const int n = dim(rng);
        const MatrixXd M = oracle::random_symmetric(rng, n);
        const MatrixXd A = oracle::random_admissible(rng, n, e);
        const double mid = (A * M).trace();
        CHECK(pucci_minus(M, e) <= mid + 1e-10);
        CHECK(mid <= pucci_plus(M, e) + 1e-10);
    }
}

TEST_CASE("Q membership in the extremal class") {
    std::mt19937_64 rng(99);
    EllipticityPair e(1.0, 2.0);
    std::uniform_int_distribution<int> dim(2, 4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int it = 0; it < 500; ++it) {
        const int n = dim(rng);
        const MatrixXd H = oracle::random_symmetric(rng, n);
        VectorXd x(n);
        do {
            for (int i = 0; i < n; ++i) x[i] = g(rng);
        } while (x.norm() < 1e-3);
        const double q = q_plus_apply(H, x, e);
        CHECK(q >= pucci_minus(H, e) - 1e-10);
        CHECK(q <= pucci_plus(H, e) + 1e-10);
        const double qm = q_minus_apply(H, x, e);
        CHECK(qm >= pucci_minus(H, e) - 1e-10);
        CHECK(qm <= pucci_plus(H, e) + 1e-10);
    }
}

TEST_CASE("positive homogeneity, duality, ellipticity") {
    std::mt19937_64 rng(31);
    EllipticityPair e(0.5, 3.0);
    std::uniform_real_distribution<double> ts(0.0, 5.0);
    for (int it = 0; it < 1000; ++it) {
        const int n = 2 + static_cast<int>(it % 3);
        const MatrixXd M = oracle::random_symmetric(rng, n);
        const double t = ts(rng);
        CHECK(pucci_plus(t * M, e) == doctest::Approx(t * pucci_plus(M, e)).epsilon(1e-10));
        CHECK(pucci_plus(M, e) == doctest::Approx(-pucci_minus(-M, e)).epsilon(1e-12));
        const MatrixXd P = oracle::random_psd(rng, n);
        CHECK(pucci_plus(M + P, e) >= pucci_plus(M, e) + e.lambda * P.trace() - 1e-10);
    }
}

TEST_CASE("q0_matrix basic values") {
    VectorXd x(3);
    x << 1.0, 0.0, 0.0;
    MatrixXd expected = MatrixXd::Zero(3, 3);
    expected(0, 0) = 1.0;
    CHECK((q0_matrix(x) - expected).cwiseAbs().maxCoeff() < 1e-15);

    VectorXd y(2);
    y << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const MatrixXd Q = q0_matrix(y);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(Q(i, j) == doctest::Approx(0.5));

    CHECK_THROWS_AS(q0_matrix(VectorXd::Zero(3)), SingularPointError);
}

TEST_CASE("q0_matrix spectral structure: eigenvalues {1, 0, ..., 0}") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        const int n = 2 + it % 3;
        VectorXd x(n);
        do {
            for (int i = 0; i < n; ++i) x[i] = g(rng);
        } while (x.norm() < 0.5);
        const MatrixXd Q = q0_matrix(x);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q, Eigen::EigenvaluesOnly);
        const auto ev = es.eigenvalues();
        CHECK(ev[n - 1] == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 0; i + 1 < n; ++i) CHECK(std::abs(ev[i]) < 1e-12);
        CHECK(Q.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cutoff variant agrees with uncut matrix for |x| >= 1/n") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n_cut = 8;
    for (int it = 0; it < 100; ++it) {
        VectorXd x(3);
        do {
            for (int i = 0; i < 3; ++i) x[i] = g(rng);
        } while (x.norm() < 1.0 / n_cut);
        CHECK((q0_matrix(x, n_cut) - q0_matrix(x)).cwiseAbs().maxCoeff() < 1e-15);
    }
    // below the inner radius the cutoff kills the matrix, including x = 0
    VectorXd tiny = VectorXd::Constant(3, 1e-3 / n_cut);
    CHECK(q0_matrix(tiny, n_cut).cwiseAbs().maxCoeff() == 0.0);
    CHECK(q0_matrix(VectorXd::Zero(3), n_cut).cwiseAbs().maxCoeff() == 0.0);
    // eta is a monotone C1 blend between the plateaus
    CHECK(cutoff_eta(0.49) == 0.0);
    CHECK(cutoff_eta(1.0) == 1.0);
    CHECK(cutoff_eta(0.75) == doctest::Approx(0.5));
    for (double t = 0.5; t < 1.0; t += 0.01)
        CHECK(cutoff_eta(t + 0.01) >= cutoff_eta(t));
}

TEST_CASE("q_plus_apply closed forms") {
    EllipticityPair e(1.0, 2.0);
    const MatrixXd H = MatrixXd::Identity(3, 3);
    VectorXd x(3);
    x << 0.3, -0.2, 0.9;
    // u = |x|^2/2 has Hessian I and Q0 u = 1
    CHECK(q_plus_apply(H, x, e) == doctest::Approx(1.0 * 3 + (2.0 - 1.0) * 1.0));
    CHECK_THROWS_AS(q_plus_apply(H, VectorXd::Zero(3), e), SingularPointError);

    // lambda = Lambda degenerates to a multiple of the Laplacian
    EllipticityPair iso(1.5, 1.5);
    std::mt19937_64 rng(3);
    for (int it = 0; it < 50; ++it) {
        const MatrixXd M = oracle::random_symmetric(rng, 3);
        VectorXd y(3);
        std::normal_distribution<double> g(0.0, 1.0);
        do {
            for (int i = 0; i < 3; ++i) y[i] = g(rng);
        } while (y.norm() < 0.5);
        CHECK(q_plus_apply(M, y, iso) == doctest::Approx(1.5 * M.trace()).epsilon(1e-12));
    }
}

TEST_CASE("q_plus_apply matches the radial form on radial test functions") {
    // u(x) = f(|x|) has Hessian f'' P_r + (f'/r)(I - P_r); Q+ u must equal
    // Lambda f'' + lambda (N-1) f'/r.
    EllipticityPair e(1.0, 2.0);
    const int N = 3;
    auto check_radial = [&](double f1, double f2, const VectorXd& x) {
        const double r = x.norm();
        const MatrixXd Pr = x * x.transpose() / (r * r);
        const MatrixXd H = f2 * Pr + f1 / r * (MatrixXd::Identity(N, N) - Pr);
        const double expect = e.Lambda * f2 + e.lambda * (N - 1) * f1 / r;
        CHECK(q_plus_apply(H, x, e) == doctest::Approx(expect).epsilon(1e-12));
    };
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int it = 0; it < 100; ++it) {
        VectorXd x(N);
        do {
            for (int i = 0; i < N; ++i) x[i] = g(rng);
        } while (x.norm() < 0.3);
        check_radial(c(rng), c(rng), x);
    }
}

TEST_CASE("qn_apply reduces to q_plus_apply away from the cutoff ball") {
    EllipticityPair e(1.0, 3.0);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        const MatrixXd H = oracle::random_symmetric(rng, 3);
        VectorXd x(3);
        do {
            for (int i = 0; i < 3; ++i) x[i] = g(rng);
        } while (x.norm() < 0.25);  // 1/n with n = 4
        CHECK(qn_apply(H, x, e, 4) == doctest::Approx(q_plus_apply(H, x, e)).epsilon(1e-12));
    }
    // at the origin the smoothed operator is lambda * trace
    const MatrixXd H = oracle::random_symmetric(rng, 3);
    CHECK(qn_apply(H, VectorXd::Zero(3), e, 4) ==
          doctest::Approx(e.lambda * H.trace()).epsilon(1e-12));
}
