// Test-only oracles, independent of the library's integration and operator
// evaluation paths.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "pucci/ellipticity.hpp"

namespace oracle {

// Classical fixed-step RK4 on (v, v') with v'' = f(r, v, v').  Returns the
// first zero of v (linear interpolation inside the bracketing step followed
// by secant refinement on re-integrated substeps) or nullopt.
struct Rk4Shot {
    double first_zero = 0.0;
    bool crossed = false;
    double v_end = 0.0;
    double dv_end = 0.0;
};

inline Rk4Shot rk4_shoot(const std::function<double(double, double, double)>& f,
                         double r0, double v0, double dv0, double rmax, double h) {
    auto step = [&](double r, std::array<double, 2> y, double hh) {
        auto k = [&](double rr, const std::array<double, 2>& yy) {
            return std::array<double, 2>{yy[1], f(rr, yy[0], yy[1])};
        };
        const auto k1 = k(r, y);
        const auto k2 = k(r + hh / 2, {y[0] + hh / 2 * k1[0], y[1] + hh / 2 * k1[1]});
        const auto k3 = k(r + hh / 2, {y[0] + hh / 2 * k2[0], y[1] + hh / 2 * k2[1]});
        const auto k4 = k(r + hh, {y[0] + hh * k3[0], y[1] + hh * k3[1]});
        return std::array<double, 2>{
            y[0] + hh / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + hh / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    };
    double r = r0;
    std::array<double, 2> y{v0, dv0};
    Rk4Shot out;
    while (r < rmax) {
        const double hh = std::min(h, rmax - r);
        const auto y2 = step(r, y, hh);
        if (y[0] > 0.0 && y2[0] <= 0.0) {
            // bisection on substeps from (r, y)
            double lo = 0.0, hi = hh;
            for (int it = 0; it < 100 && hi - lo > 1e-15 * hh; ++it) {
                const double mid = 0.5 * (lo + hi);
                (step(r, y, mid)[0] <= 0.0 ? hi : lo) = mid;
            }
            out.crossed = true;
            out.first_zero = r + 0.5 * (lo + hi);
            return out;
        }
        y = y2;
        r += hh;
    }
    out.v_end = y[0];
    out.dv_end = y[1];
    return out;
}

// Plain fixed-step RK4 without event handling: integrates straight to rend
// (for linearized solutions, which legitimately change sign).
inline std::array<double, 2> rk4_integrate(
    const std::function<double(double, double, double)>& f, double r0, double v0,
    double dv0, double rend, double h) {
    auto k = [&](double rr, const std::array<double, 2>& yy) {
        return std::array<double, 2>{yy[1], f(rr, yy[0], yy[1])};
    };
    double r = r0;
    std::array<double, 2> y{v0, dv0};
    while (r < rend) {
        const double hh = std::min(h, rend - r);
        const auto k1 = k(r, y);
        const auto k2 = k(r + hh / 2, {y[0] + hh / 2 * k1[0], y[1] + hh / 2 * k1[1]});
        const auto k3 = k(r + hh / 2, {y[0] + hh / 2 * k2[0], y[1] + hh / 2 * k2[1]});
        const auto k4 = k(r + hh, {y[0] + hh * k3[0], y[1] + hh * k3[1]});
        y = {y[0] + hh / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
             y[1] + hh / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
        r += hh;
    }
    return y;
}

// Brute-force Pucci maximum: max over the 2^n weight assignments
// a_i in {lambda, Lambda} in the eigenbasis of M of tr(Q diag(a) Q^T M).
inline double pucci_plus_bruteforce(const Eigen::MatrixXd& M,
                                    const pucci::EllipticityPair& e) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const Eigen::MatrixXd Q = es.eigenvectors();
    const int n = static_cast<int>(M.rows());
    double best = -std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << n); ++mask) {
        Eigen::VectorXd a(n);
        for (int i = 0; i < n; ++i) a[i] = (mask >> i) & 1 ? e.Lambda : e.lambda;
        const Eigen::MatrixXd A = Q * a.asDiagonal() * Q.transpose();
        best = std::max(best, (A * M).trace());
    }
    return best;
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = g(rng);
    return 0.5 * (B + B.transpose());
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = g(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(B).householderQ();
}

// Random A with lambda I <= A <= Lambda I.
inline Eigen::MatrixXd random_admissible(std::mt19937_64& rng, int n,
                                         const pucci::EllipticityPair& e) {
    std::uniform_real_distribution<double> u(e.lambda, e.Lambda);
    const Eigen::MatrixXd Q = random_orthogonal(rng, n);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = u(rng);
    return Q * d.asDiagonal() * Q.transpose();
}

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n, double scale = 1.0) {
    const Eigen::MatrixXd B = random_symmetric(rng, n, scale);
    return B * B.transpose();
}

}  // namespace oracle
