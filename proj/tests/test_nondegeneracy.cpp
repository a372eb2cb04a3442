#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pucci/errors.hpp"
#include "pucci/nondegeneracy.hpp"
#include "pucci/radial.hpp"

using namespace pucci;

TEST_CASE("sphere eigenvalues") {
    CHECK(sphere_eigenvalue(0, 3) == 0.0);
    CHECK(sphere_eigenvalue(0, 7) == 0.0);
    // -k(k+N-2): the classical sphere spectrum (k=1 on S^2 gives -2)
    CHECK(sphere_eigenvalue(1, 3) == doctest::Approx(-2.0));
    CHECK(sphere_eigenvalue(1, 4) == doctest::Approx(-3.0));
    CHECK(sphere_eigenvalue(2, 4) == doctest::Approx(-8.0));
    CHECK_THROWS_AS(sphere_eigenvalue(-1, 3), std::invalid_argument);
}

TEST_CASE("indicial exponent: quadratic roots") {
    // s(s-1) + (nt-1)s + c = s^2 + (nt-2)s + c
    CHECK(indicial_exponent(4.0, -1.5) == doctest::Approx(-1.0 + std::sqrt(2.5)));
    CHECK(indicial_exponent(3.0, -2.0) == doctest::Approx(1.0));
    CHECK(indicial_exponent(2.0, -1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(indicial_exponent(3.0, 0.5), std::logic_error);
    // the root solves the quadratic
    for (double nt : {2.0, 2.5, 3.0, 4.5}) {
        for (double c : {-0.5, -2.0, -7.5}) {
            const double s = indicial_exponent(nt, c);
            CHECK(s > 0.0);
            CHECK(s * (s - 1.0) + (nt - 1.0) * s + c == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("radial non-degeneracy: closed-form endpoint identity") {
    // h solves the linearization with h(0) = 1, h'(0) = 0; the scaling-family
    // derivative h1 = v + ((p-1)/2) r v' solves the same equation with
    // h1(0) = v(0), so h(1) v(0) = h1(1) = ((p-1)/2) v'(1).
    for (auto [nt, p] : {std::pair{3.0, 3.0}, {2.5, 4.0}, {4.0, 2.2}}) {
        RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(nt, p));
        NondegReport rep = radial_nondegeneracy(v, nt, p);
        CHECK(rep.nondegenerate);
        const double expected = (p - 1.0) / 2.0 * v.derivs.back() / v.values.front();
        CHECK(rep.h_at_1 == doctest::Approx(expected).epsilon(1e-7));
        CHECK(rep.h_at_1 < 0.0);
    }
}

TEST_CASE("radial non-degeneracy: halved-step oracle agreement") {
    const double nt = 3.0, p = 3.0;
    RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(nt, p));
    NondegReport rep = radial_nondegeneracy(v, nt, p);

    auto f = [&](double r, double h, double dh) {
        return -(nt - 1.0) / r * dh - p * std::pow(std::max(v.value_at(r), 0.0), p - 1.0) * h;
    };
    const double r0 = 1e-6;
    const double c0 = p * std::pow(v.values.front(), p - 1.0);
    auto run = [&](double step) {
        return oracle::rk4_integrate(f, r0, 1.0 - c0 * r0 * r0 / (2 * nt), -c0 * r0 / nt,
                                     1.0, step);
    };
    const auto coarse = run(2e-4), fine = run(1e-4);
    CHECK(std::abs(coarse[0] - fine[0]) < 1e-9);
    CHECK(rep.h_at_1 == doctest::Approx(fine[0]).epsilon(1e-8));
}

TEST_CASE("h1 construction: residual and endpoint signs") {
    const double nt = 3.0, p = 3.0;
    RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(nt, p));
    // h1 = v + ((p-1)/2) r v' on the profile grid
    const std::size_t n = v.size();
    std::vector<double> h1(n);
    for (std::size_t i = 0; i < n; ++i)
        h1[i] = v.values[i] + 0.5 * (p - 1.0) * v.radii[i] * v.derivs[i];
    CHECK(h1.front() == doctest::Approx(v.values.front()));
    CHECK(h1.front() > 0.0);
    CHECK(h1.back() == doctest::Approx(0.5 * (p - 1.0) * v.derivs.back()));
    CHECK(h1.back() < 0.0);

    // residual of h1 in the linearized equation, 4th-order differences
    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double h = v.radii[i + 1] - v.radii[i];
        const double d1 =
            (-h1[i + 2] + 8 * h1[i + 1] - 8 * h1[i - 1] + h1[i - 2]) / (12 * h);
        const double d2 = (-h1[i + 2] + 16 * h1[i + 1] - 30 * h1[i] + 16 * h1[i - 1] -
                           h1[i - 2]) /
                          (12 * h * h);
        const double r = v.radii[i];
        const double res = d2 + (nt - 1.0) / r * d1 +
                           p * std::pow(std::max(v.values[i], 0.0), p - 1.0) * h1[i];
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("mode non-degeneracy: basic case and halved-step oracle") {
    EllipticityPair e(1.0, 2.0);
    const int N = 3;
    const double p = 3.0;
    ModeProblem mp{1, N, e, p, q_radial_base_solution(N, e, p), QForm::Plus};
    ModeReport rep = mode_nondegeneracy(mp);
    CHECK(rep.nondegenerate);
    CHECK(rep.sigma > 0.0);

    const double nt = mp.n_tilde();
    const double coupling = mp.mode_coupling();
    auto f = [&](double r, double a, double da) {
        const double u = std::max(mp.base.value_at(r), 0.0);
        return -(nt - 1.0) / r * da - coupling * a / (r * r) -
               p / e.Lambda * std::pow(u, p - 1.0) * a;
    };
    const double r0 = 1e-6;
    auto run = [&](double step) {
        return oracle::rk4_integrate(f, r0, std::pow(r0, rep.sigma),
                                     rep.sigma * std::pow(r0, rep.sigma - 1.0), 1.0, step);
    };
    const auto fine = run(1e-4);
    CHECK(rep.a_at_1 == doctest::Approx(fine[0]).epsilon(1e-7));

    CHECK_THROWS_AS(mode_nondegeneracy(ModeProblem{0, N, e, p, mp.base, QForm::Plus}),
                    std::invalid_argument);
}

TEST_CASE("mode sweep k = 1..6: non-degenerate, endpoint ratio grows") {
    EllipticityPair e(1.0, 2.0);
    const int N = 3;
    const double p = 3.0;
    RadialProfile base = q_radial_base_solution(N, e, p);
    double prev_ratio = 0.0;
    bool monotone = true;
    for (int k = 1; k <= 6; ++k) {
        ModeProblem mp{k, N, e, p, base, QForm::Plus};
        ModeReport rep = mode_nondegeneracy(mp);
        CHECK(rep.nondegenerate);
        const double ratio = std::abs(rep.a_at_1) / rep.max_abs_a;
        // higher modes leave the endpoint ever less degenerate; the ratio
        // saturates at 1 once a_k becomes monotone, so non-strict growth
        if (ratio < prev_ratio - 1e-12) monotone = false;
        prev_ratio = ratio;
    }
    WARN(monotone);  // regularity observation, non-fatal by design
}

TEST_CASE("sturm cross check") {
    EllipticityPair e(1.0, 2.0);
    const int N = 3;
    const double p = 3.0;
    RadialProfile base = q_radial_base_solution(N, e, p);
    // Neumann condition at the origin for w = u0'
    CHECK(base.derivs.front() == 0.0);
    for (int k : {1, 2, 3}) {
        ModeProblem mp{k, N, e, p, base, QForm::Plus};
        SturmReport rep = sturm_cross_check(mp);
        CHECK(rep.ok);
        CHECK(rep.identity_drift < 1e-6);
    }
}

TEST_CASE("degenerate detection is not vacuous: potential scan flips h(1)") {
    const double nt = 3.0, p = 3.0;
    RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(nt, p));
    int sign_changes = 0;
    double prev = 0.0;
    for (double mu = 0.5; mu <= 2.0 + 1e-9; mu += 0.05) {
        NondegReport rep = radial_nondegeneracy(v, nt, p, 1e-6, mu);
        if (prev != 0.0 && rep.h_at_1 * prev < 0.0) ++sign_changes;
        prev = rep.h_at_1;
    }
    CHECK(sign_changes >= 1);
}

TEST_CASE("invalid base profiles are rejected") {
    RadialProfile junk;
    junk.radii = {0.0, 0.5, 1.0};
    junk.values = {1.0, 0.7, 0.0};
    junk.derivs = {0.0, -0.8, -1.2};
    CHECK_THROWS_AS(radial_nondegeneracy(junk, 3.0, 3.0), InvalidBaseError);

    // a genuine profile checked against the wrong equation also fails
    RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(3.0, 3.0));
    EllipticityPair e(1.0, 2.0);
    ModeProblem mp{1, 3, e, 3.0, v, QForm::Plus};  // v is not the (2.1)-form base
    CHECK_THROWS_AS(mode_nondegeneracy(mp), InvalidBaseError);
}
