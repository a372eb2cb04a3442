#include "pucci/domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pucci/errors.hpp"
#include "pucci/nondegeneracy.hpp"

namespace pucci {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ShapeKind shape_from_name(const std::string& name) {
    if (name == "cos2") return ShapeKind::Cos2;
    if (name == "cos3") return ShapeKind::Cos3;
    if (name == "bump") return ShapeKind::Bump;
    throw ConfigError("unknown shape '" + name + "' (expected cos2, cos3 or bump)");
}

std::string shape_name(ShapeKind s) {
    switch (s) {
        case ShapeKind::Cos2: return "cos2";
        case ShapeKind::Cos3: return "cos3";
        case ShapeKind::Bump: return "bump";
    }
    return "?";
}

PerturbedBall::PerturbedBall(int N, double eps, ShapeKind s)
    : dim(N), epsilon(eps), shape(s) {
    if (N < 3) throw std::invalid_argument("PerturbedBall: need N >= 3");
    if (eps < 0.0) throw std::invalid_argument("PerturbedBall: need epsilon >= 0");
    std::ostringstream os;
    os << "ball(N=" << N << ") + " << eps << " * " << shape_name(s);
    description = os.str();
}

namespace {
// bump parameters: centered off the equator so the antipodal ghost
// interpolation is genuinely exercised; ||g||_inf = 1
constexpr double kBumpCenter = kPi / 3.0;
constexpr double kBumpWidth = 0.22;
}  // namespace

double PerturbedBall::shape_g(double th) const {
    switch (shape) {
        case ShapeKind::Cos2: return std::cos(2.0 * th);
        case ShapeKind::Cos3: return std::cos(3.0 * th);
        case ShapeKind::Bump: {
            const double z = (th - kBumpCenter) / kBumpWidth;
            return std::exp(-z * z);
        }
    }
    return 0.0;
}

double PerturbedBall::shape_dg(double th) const {
    switch (shape) {
        case ShapeKind::Cos2: return -2.0 * std::sin(2.0 * th);
        case ShapeKind::Cos3: return -3.0 * std::sin(3.0 * th);
        case ShapeKind::Bump: {
            const double z = (th - kBumpCenter) / kBumpWidth;
            return std::exp(-z * z) * (-2.0 * z / kBumpWidth);
        }
    }
    return 0.0;
}

double PerturbedBall::shape_d2g(double th) const {
    switch (shape) {
        case ShapeKind::Cos2: return -4.0 * std::cos(2.0 * th);
        case ShapeKind::Cos3: return -9.0 * std::cos(3.0 * th);
        case ShapeKind::Bump: {
            const double z = (th - kBumpCenter) / kBumpWidth;
            return std::exp(-z * z) * (4.0 * z * z - 2.0) / (kBumpWidth * kBumpWidth);
        }
    }
    return 0.0;
}

MeridianGrid build_grid(const PerturbedBall& dom, int nr, int ntheta) {
    if (nr < 16 || ntheta < 16)
        throw std::invalid_argument("build_grid: resolution must be at least 16x16");
    MeridianGrid g;
    g.dom = dom;
    g.nr = nr;
    g.ntheta = ntheta;
    g.hs = 1.0 / nr;
    g.htheta = kPi / ntheta;
    g.s.resize(nr);
    for (int i = 0; i < nr; ++i) g.s[i] = (i + 0.5) * g.hs;
    g.theta.resize(ntheta);
    g.rho.resize(ntheta);
    g.drho.resize(ntheta);
    g.d2rho.resize(ntheta);
    g.cot.resize(ntheta);
    double worst_skew = 0.0, min_rho = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ntheta; ++j) {
        const double th = (j + 0.5) * g.htheta;
        g.theta[j] = th;
        g.rho[j] = dom.rho(th);
        g.drho[j] = dom.drho(th);
        g.d2rho[j] = dom.d2rho(th);
        g.cot[j] = std::cos(th) / std::sin(th);
        min_rho = std::min(min_rho, g.rho[j]);
        worst_skew = std::max(worst_skew, std::abs(g.drho[j]) / g.rho[j]);
    }
    if (min_rho <= 0.05)
        throw GridFailure("build_grid: boundary map degenerates (rho <= 0.05)",
                          dom.epsilon);
    if (worst_skew > 10.0)
        throw GridFailure("build_grid: mapped coordinates too skewed (|rho'|/rho > 10)",
                          dom.epsilon);
    g.min_jacobian = g.s[0] * min_rho * min_rho;
    return g;
}

namespace {

struct Entry {
    int idx;
    double w;
};

// Resolves a logical stencil node into unknown indices.  Out-of-range theta
// mirrors across the polar axis (axisymmetric even extension); i = -1 passes
// through the origin to the antipodal column with a quadratic interpolation
// in s compensating rho(theta) != rho(pi - theta).
void resolve(const MeridianGrid& g, int i, int j, double w, std::vector<Entry>& out) {
    if (j < 0) j = -1 - j;
    else if (j >= g.ntheta) j = 2 * g.ntheta - 1 - j;
    if (i >= 0) {
        out.push_back({i < g.nr ? g.index(i, j) : g.boundary_index(j), w});
        return;
    }
    const int jj = g.ntheta - 1 - j;
    const double s_star = g.s[0] * g.rho[j] / g.rho[jj];
    const double s0 = g.s[0], s1 = g.s[1], s2 = g.s[2];
    const double l0 = (s_star - s1) * (s_star - s2) / ((s0 - s1) * (s0 - s2));
    const double l1 = (s_star - s0) * (s_star - s2) / ((s1 - s0) * (s1 - s2));
    const double l2 = (s_star - s0) * (s_star - s1) / ((s2 - s0) * (s2 - s1));
    out.push_back({g.index(0, jj), w * l0});
    out.push_back({g.index(1, jj), w * l1});
    out.push_back({g.index(2, jj), w * l2});
}

// First-derivative weights in s at row i (relative node index, weight).
// The last interior row sees the boundary ring at distance hs/2.
void s_first_weights(const MeridianGrid& g, int i, std::array<std::pair<int, double>, 3>& w) {
    if (i < g.nr - 1) {
        w = {{{i - 1, -0.5 / g.hs}, {i, 0.0}, {i + 1, 0.5 / g.hs}}};
    } else {
        const double a = g.hs, b = 0.5 * g.hs;
        const double den = a * b * (a + b);
        w = {{{i - 1, -b * b / den}, {i, (b * b - a * a) / den}, {i + 1, a * a / den}}};
    }
}

void s_second_weights(const MeridianGrid& g, int i, std::array<std::pair<int, double>, 3>& w) {
    if (i < g.nr - 1) {
        const double c = 1.0 / (g.hs * g.hs);
        w = {{{i - 1, c}, {i, -2.0 * c}, {i + 1, c}}};
    } else {
        const double a = g.hs, b = 0.5 * g.hs;
        w = {{{i - 1, 2.0 / (a * (a + b))}, {i, -2.0 / (a * b)}, {i + 1, 2.0 / (b * (a + b))}}};
    }
}

// Stencil coefficients multiplying the five mapped derivatives
// (u_ss, u_st, u_tt, u_s, u_t) for the frame-weighted operator at a node.
struct MappedCoeffs {
    double ss = 0, st = 0, tt = 0, s = 0, t = 0;
};

MappedCoeffs mapped_coeffs(const MeridianGrid& g, int i, int j, double c_rr, double c_rt,
                           double c_tt, double c_az) {
    const double sp = g.s[i];
    const double rho = g.rho[j], r1 = g.drho[j], r2 = g.d2rho[j], ct = g.cot[j];
    const double rho2 = rho * rho, rho3 = rho2 * rho, rho4 = rho2 * rho2;
    MappedCoeffs c;
    // H_rr = u_ss / rho^2
    c.ss += c_rr / rho2;
    // H_rt = u_st/(s rho^2) - u_ss rho'/rho^3 - u_t/(s^2 rho^2)
    c.st += 2.0 * c_rt / (sp * rho2);
    c.ss += 2.0 * c_rt * (-r1 / rho3);
    c.t += 2.0 * c_rt * (-1.0 / (sp * sp * rho2));
    // H_tt = u_tt/(s^2 rho^2) - 2 rho' u_st/(s rho^3) + rho'^2 u_ss/rho^4
    //        + u_s [1/(s rho^2) - (rho'' rho - 2 rho'^2)/(s rho^4)]
    c.tt += c_tt / (sp * sp * rho2);
    c.st += c_tt * (-2.0 * r1 / (sp * rho3));
    c.ss += c_tt * (r1 * r1 / rho4);
    c.s += c_tt * (1.0 / (sp * rho2) - (r2 * rho - 2.0 * r1 * r1) / (sp * rho4));
    // mu = u_s [1/(s rho^2) - cot rho'/(s rho^3)] + u_t cot/(s^2 rho^2)
    c.s += c_az * (1.0 / (sp * rho2) - ct * r1 / (sp * rho3));
    c.t += c_az * (ct / (sp * sp * rho2));
    return c;
}

// Emits the full stencil of the five-derivative combination at (i, j).
void emit_stencil(const MeridianGrid& g, int i, int j, const MappedCoeffs& c,
                  std::vector<Entry>& out) {
    const double ht = g.htheta;
    std::array<std::pair<int, double>, 3> s1w, s2w;
    s_first_weights(g, i, s1w);
    s_second_weights(g, i, s2w);

    if (c.ss != 0.0)
        for (const auto& [ii, w] : s2w)
            if (w != 0.0) resolve(g, ii, j, c.ss * w, out);
    if (c.s != 0.0)
        for (const auto& [ii, w] : s1w)
            if (w != 0.0) resolve(g, ii, j, c.s * w, out);
    if (c.tt != 0.0) {
        const double w = c.tt / (ht * ht);
        resolve(g, i, j - 1, w, out);
        resolve(g, i, j, -2.0 * w, out);
        resolve(g, i, j + 1, w, out);
    }
    if (c.t != 0.0) {
        const double w = c.t / (2.0 * ht);
        resolve(g, i, j - 1, -w, out);
        resolve(g, i, j + 1, w, out);
    }
    if (c.st != 0.0)
        for (const auto& [ii, w] : s1w) {
            if (w == 0.0) continue;
            resolve(g, ii, j - 1, -c.st * w / (2.0 * ht), out);
            resolve(g, ii, j + 1, c.st * w / (2.0 * ht), out);
        }
}

double eval_entries(const Eigen::VectorXd& u, const std::vector<Entry>& es) {
    double acc = 0.0;
    for (const auto& e : es) acc += e.w * u[e.idx];
    return acc;
}

// Raw mapped derivatives of u at an interior node.
struct MappedDerivs {
    double ss, st, tt, s, t;
};

MappedDerivs mapped_derivs(const Eigen::VectorXd& u, const MeridianGrid& g, int i, int j) {
    std::array<std::pair<int, double>, 3> s1w, s2w;
    s_first_weights(g, i, s1w);
    s_second_weights(g, i, s2w);
    const double ht = g.htheta;
    std::vector<Entry> es;
    es.reserve(8);

    auto eval = [&](auto&& fill) {
        es.clear();
        fill();
        return eval_entries(u, es);
    };

    MappedDerivs d{};
    d.ss = eval([&] {
        for (const auto& [ii, w] : s2w) resolve(g, ii, j, w, es);
    });
    d.s = eval([&] {
        for (const auto& [ii, w] : s1w)
            if (w != 0.0) resolve(g, ii, j, w, es);
    });
    d.tt = eval([&] {
        resolve(g, i, j - 1, 1.0 / (ht * ht), es);
        resolve(g, i, j, -2.0 / (ht * ht), es);
        resolve(g, i, j + 1, 1.0 / (ht * ht), es);
    });
    d.t = eval([&] {
        resolve(g, i, j - 1, -0.5 / ht, es);
        resolve(g, i, j + 1, 0.5 / ht, es);
    });
    d.st = eval([&] {
        for (const auto& [ii, w] : s1w) {
            if (w == 0.0) continue;
            resolve(g, ii, j - 1, -w / (2.0 * ht), es);
            resolve(g, ii, j + 1, w / (2.0 * ht), es);
        }
    });
    return d;
}

FrameHessian frame_from_derivs(const MeridianGrid& g, int i, int j, const MappedDerivs& d) {
    const double sp = g.s[i];
    const double rho = g.rho[j], r1 = g.drho[j], r2 = g.d2rho[j], ct = g.cot[j];
    const double rho2 = rho * rho, rho3 = rho2 * rho, rho4 = rho2 * rho2;
    FrameHessian H;
    H.h_rr = d.ss / rho2;
    H.h_rt = d.st / (sp * rho2) - d.ss * r1 / rho3 - d.t / (sp * sp * rho2);
    H.h_tt = d.tt / (sp * sp * rho2) - 2.0 * r1 * d.st / (sp * rho3) +
             r1 * r1 * d.ss / rho4 +
             d.s * (1.0 / (sp * rho2) - (r2 * rho - 2.0 * r1 * r1) / (sp * rho4));
    H.mu = d.s * (1.0 / (sp * rho2) - ct * r1 / (sp * rho3)) +
           d.t * ct / (sp * sp * rho2);
    return H;
}

struct Eigen2 {
    double e_hi, e_lo;        // e_hi >= e_lo
    double v_hi[2], v_lo[2];  // orthonormal eigenvectors
};

Eigen2 eigen_sym2(double a, double b, double c) {  // [[a, b], [b, c]]
    Eigen2 r;
    const double m = 0.5 * (a + c), d = 0.5 * (a - c);
    const double q = std::hypot(d, b);
    r.e_hi = m + q;
    r.e_lo = m - q;
    if (q < 1e-300 || std::abs(b) < 1e-14 * (std::abs(a) + std::abs(c) + 1e-300)) {
        const bool first = a >= c;
        r.v_hi[0] = first ? 1.0 : 0.0;
        r.v_hi[1] = first ? 0.0 : 1.0;
    } else {
        // eigenvector of e_hi: (b, e_hi - a) normalized
        double vx = b, vy = r.e_hi - a;
        const double n = std::hypot(vx, vy);
        r.v_hi[0] = vx / n;
        r.v_hi[1] = vy / n;
    }
    r.v_lo[0] = -r.v_hi[1];
    r.v_lo[1] = r.v_hi[0];
    return r;
}

double extremal_weight(double eig, const EllipticityPair& e, PucciSide side) {
    if (side == PucciSide::Plus) return eig >= 0.0 ? e.Lambda : e.lambda;
    return eig >= 0.0 ? e.lambda : e.Lambda;
}

}  // namespace

SparseMat assemble_operator(const MeridianGrid& g, const FrameWeights& w) {
    const int n_int = g.interior_count();
    const int n_tot = g.total_count();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_int) * 14 + g.ntheta);
    std::vector<Entry> es;
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.ntheta; ++j) {
            const int row = g.index(i, j);
            const MappedCoeffs c =
                mapped_coeffs(g, i, j, w.c_rr[row], w.c_rt[row], w.c_tt[row], w.c_az[row]);
            es.clear();
            emit_stencil(g, i, j, c, es);
            for (const auto& en : es) trip.emplace_back(row, en.idx, en.w);
        }
    }
    for (int j = 0; j < g.ntheta; ++j)
        trip.emplace_back(g.boundary_index(j), g.boundary_index(j), 1.0);
    SparseMat L(n_tot, n_tot);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

SparseMat discretize_q_plus(const MeridianGrid& g, const EllipticityPair& e, int N) {
    if (N < 3) throw std::invalid_argument("discretize_q_plus: need N >= 3");
    const int n = g.interior_count();
    FrameWeights w;
    w.c_rr = Eigen::VectorXd::Constant(n, e.Lambda);
    w.c_rt = Eigen::VectorXd::Zero(n);
    w.c_tt = Eigen::VectorXd::Constant(n, e.lambda);
    w.c_az = Eigen::VectorXd::Constant(n, e.lambda * (N - 2));
    return assemble_operator(g, w);
}

FrameHessian frame_hessian_at(const Eigen::VectorXd& u, const MeridianGrid& g,
                              int i, int j) {
    return frame_from_derivs(g, i, j, mapped_derivs(u, g, i, j));
}

namespace {

// Splits u into per-ring theta-means and the remaining deviation.  The
// angular stencils annihilate ring constants exactly in floating point, so
// evaluating the two parts separately removes the cancellation noise the
// near-origin 1/r^2 coefficients would otherwise amplify.
Eigen::VectorXd ring_means(const Eigen::VectorXd& u, const MeridianGrid& g) {
    Eigen::VectorXd ubar(g.total_count());
    for (int i = 0; i < g.nr; ++i) {
        double m = 0.0;
        for (int j = 0; j < g.ntheta; ++j) m += u[g.index(i, j)];
        m /= g.ntheta;
        for (int j = 0; j < g.ntheta; ++j) ubar[g.index(i, j)] = m;
    }
    double mb = 0.0;
    for (int j = 0; j < g.ntheta; ++j) mb += u[g.boundary_index(j)];
    mb /= g.ntheta;
    for (int j = 0; j < g.ntheta; ++j) ubar[g.boundary_index(j)] = mb;
    return ubar;
}

}  // namespace

Eigen::VectorXd pucci_fd_apply(const Eigen::VectorXd& u, const MeridianGrid& g,
                               const EllipticityPair& e, int N, PucciSide side) {
    if (u.size() != g.total_count())
        throw std::invalid_argument("pucci_fd_apply: size mismatch");
    const Eigen::VectorXd ubar = ring_means(u, g);
    const Eigen::VectorXd w = u - ubar;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.total_count());
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.ntheta; ++j) {
            const MappedDerivs dw = mapped_derivs(w, g, i, j);
            const MappedDerivs db = mapped_derivs(ubar, g, i, j);
            const MappedDerivs d{dw.ss + db.ss, dw.st + db.st, dw.tt + db.tt,
                                 dw.s + db.s, dw.t + db.t};
            const FrameHessian H = frame_from_derivs(g, i, j, d);
            const Eigen2 eg = eigen_sym2(H.h_rr, H.h_rt, H.h_tt);
            double val = extremal_weight(eg.e_hi, e, side) * eg.e_hi +
                         extremal_weight(eg.e_lo, e, side) * eg.e_lo +
                         (N - 2) * extremal_weight(H.mu, e, side) * H.mu;
            if (!std::isfinite(val))
                throw std::runtime_error("pucci_fd_apply: non-finite stencil value");
            out[g.index(i, j)] = val;
        }
    }
    return out;
}

namespace {

// Policy operator: freezes the optimal diffusion coefficients of M+/M- at
// the current iterate (eigenframe of the meridian Hessian block plus the
// azimuthal weight) and returns the induced linear operator.
SparseMat assemble_policy_operator(const Eigen::VectorXd& u, const MeridianGrid& g,
                                   const EllipticityPair& e, int N, PucciSide side) {
    const int n = g.interior_count();
    FrameWeights w;
    w.c_rr.resize(n);
    w.c_rt.resize(n);
    w.c_tt.resize(n);
    w.c_az.resize(n);
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.ntheta; ++j) {
            const int row = g.index(i, j);
            const FrameHessian H = frame_hessian_at(u, g, i, j);
            const Eigen2 eg = eigen_sym2(H.h_rr, H.h_rt, H.h_tt);
            const double w_hi = extremal_weight(eg.e_hi, e, side);
            const double w_lo = extremal_weight(eg.e_lo, e, side);
            w.c_rr[row] = w_hi * eg.v_hi[0] * eg.v_hi[0] + w_lo * eg.v_lo[0] * eg.v_lo[0];
            w.c_rt[row] = w_hi * eg.v_hi[0] * eg.v_hi[1] + w_lo * eg.v_lo[0] * eg.v_lo[1];
            w.c_tt[row] = w_hi * eg.v_hi[1] * eg.v_hi[1] + w_lo * eg.v_lo[1] * eg.v_lo[1];
            w.c_az[row] = (N - 2) * extremal_weight(H.mu, e, side);
        }
    }
    return assemble_operator(g, w);
}

}  // namespace

Eigen::VectorXd seed_from_profile(const MeridianGrid& grid, const RadialProfile& u0) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(grid.total_count());
    for (int i = 0; i < grid.nr; ++i) {
        const double v = u0.value_at(grid.s[i]);
        for (int j = 0; j < grid.ntheta; ++j) u[grid.index(i, j)] = v;
    }
    return u;
}

double delta_vs_radial(const DiscreteSolution& sol, const RadialProfile& u0) {
    double d = 0.0;
    const auto& g = sol.grid;
    for (int i = 0; i < g.nr; ++i) {
        const double v = u0.value_at(g.s[i]);
        for (int j = 0; j < g.ntheta; ++j)
            d = std::max(d, std::abs(sol.values[g.index(i, j)] - v));
    }
    return d;
}

DiscreteSolution solve_semilinear(const MeridianGrid& grid, SemilinearKind kind,
                                  const EllipticityPair& e, double p,
                                  const Eigen::VectorXd& init, double tol) {
    const int n_int = grid.interior_count();
    const int n_tot = grid.total_count();
    if (init.size() != n_tot)
        throw std::invalid_argument("solve_semilinear: init size mismatch");
    for (int k = 0; k < n_int; ++k)
        if (!(init[k] > 0.0))
            throw std::invalid_argument("solve_semilinear: seed must be positive inside");
    const int N = grid.dom.dim;

    Eigen::VectorXd u = init;
    for (int j = 0; j < grid.ntheta; ++j) u[grid.boundary_index(j)] = 0.0;

    SparseMat L_fixed;
    if (kind == SemilinearKind::QPlus) L_fixed = discretize_q_plus(grid, e, N);

    auto nonlinear_residual = [&](const Eigen::VectorXd& uu) -> Eigen::VectorXd {
        Eigen::VectorXd r;
        if (kind == SemilinearKind::QPlus) {
            // split off the ring means so the angular stencils see exact
            // zeros; otherwise the 1/r^2 coefficients amplify rounding noise
            // far above the attainable residual
            const Eigen::VectorXd ubar = ring_means(uu, grid);
            r = L_fixed * (uu - ubar);
            r += L_fixed * ubar;
        } else {
            r = pucci_fd_apply(uu, grid, e, N);
        }
        for (int k = 0; k < n_int; ++k)
            r[k] += std::pow(std::max(uu[k], 0.0), p);
        for (int j = 0; j < grid.ntheta; ++j) {
            const int b = grid.boundary_index(j);
            r[b] = uu[b];
        }
        return r;
    };

    std::vector<double> history;
    Eigen::VectorXd G = nonlinear_residual(u);
    double res = G.cwiseAbs().maxCoeff();
    history.push_back(res);

    const int max_iters = 60;
    int iter = 0;
    int growth_run = 0;
    while (res > tol && iter < max_iters) {
        SparseMat L = (kind == SemilinearKind::QPlus)
                          ? L_fixed
                          : assemble_policy_operator(u, grid, e, N, PucciSide::Plus);
        // Jacobian: L + p (u_+)^{p-1} on the interior diagonal
        SparseMat J = L;
        {
            std::vector<Eigen::Triplet<double>> dtrip;
            dtrip.reserve(n_int);
            for (int k = 0; k < n_int; ++k) {
                const double up = std::max(u[k], 0.0);
                dtrip.emplace_back(k, k, p * std::pow(up, p - 1.0));
            }
            SparseMat D(n_tot, n_tot);
            D.setFromTriplets(dtrip.begin(), dtrip.end());
            J = L + D;
        }
        J.makeCompressed();
        Eigen::SparseLU<SparseMat> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw NewtonDivergence("solve_semilinear: singular Jacobian", history);
        const Eigen::VectorXd delta = lu.solve(-G);
        // backtracking damping: halve the step while the residual grows
        double step = 1.0;
        Eigen::VectorXd u_try;
        Eigen::VectorXd G_try;
        double res_try = 0.0;
        for (int bt = 0; bt < 7; ++bt) {
            u_try = u + step * delta;
            G_try = nonlinear_residual(u_try);
            res_try = G_try.cwiseAbs().maxCoeff();
            if (res_try < res || res <= 4.0 * tol) break;
            step *= 0.5;
        }
        u = u_try;
        G = G_try;
        res = res_try;
        history.push_back(res);
        ++iter;
        growth_run = res >= history[history.size() - 2] ? growth_run + 1 : 0;
        if (growth_run >= 5)
            throw NewtonDivergence("solve_semilinear: residual grew over 5 steps", history);
    }
    if (res > tol)
        throw NewtonDivergence("solve_semilinear: iteration cap without convergence",
                               history);
    for (int k = 0; k < n_int; ++k)
        if (!(u[k] > 0.0))
            throw PositivityFailure("solve_semilinear: converged iterate not strictly "
                                    "positive inside");
    DiscreteSolution sol{grid, std::move(u), res, iter};
    return sol;
}

ContinuationResult continuation_in_epsilon(int N, ShapeKind shape, SemilinearKind kind,
                                           const EllipticityPair& e, double p,
                                           const std::vector<double>& eps_list,
                                           int nr, int ntheta, double tol) {
    if (eps_list.empty())
        throw std::invalid_argument("continuation_in_epsilon: empty eps list");
    ContinuationResult out;
    out.baseline = (kind == SemilinearKind::QPlus)
                       ? q_radial_base_solution(N, e, p, QForm::Plus)
                       : dirichlet_radial_solution(RadialProblem::pucci_plus(N, e, p));
    Eigen::VectorXd seed;
    for (double eps : eps_list) {
        MeridianGrid g = build_grid(PerturbedBall(N, eps, shape), nr, ntheta);
        if (seed.size() == 0) seed = seed_from_profile(g, out.baseline);
        try {
            DiscreteSolution sol = solve_semilinear(g, kind, e, p, seed, tol);
            seed = sol.values;
            out.deltas.push_back(delta_vs_radial(sol, out.baseline));
            out.eps.push_back(eps);
            out.solutions.push_back(std::move(sol));
        } catch (const NewtonDivergence& err) {
            std::ostringstream os;
            os << "continuation failed at eps=" << eps << ": " << err.what();
            throw NewtonDivergence(os.str(), err.residual_history);
        } catch (const PositivityFailure& err) {
            std::ostringstream os;
            os << "continuation failed at eps=" << eps << ": " << err.what();
            throw PositivityFailure(os.str());
        }
    }
    out.deltas_decreasing = true;
    for (std::size_t i = 1; i < out.deltas.size(); ++i)
        if (!(out.deltas[i] < out.deltas[i - 1])) out.deltas_decreasing = false;
    return out;
}

HomotopyResult homotopy_in_s(const EllipticityPair& e, int N, double p_target,
                             const PerturbedBall& dom, int steps, int nr, int ntheta,
                             double tol) {
    if (steps < 1) throw std::invalid_argument("homotopy_in_s: need steps >= 1");
    if (dom.dim != N) throw std::invalid_argument("homotopy_in_s: dimension mismatch");
    MeridianGrid grid = build_grid(dom, nr, ntheta);

    auto p_star_plus = [&](double s) {
        const EllipticityPair es(s, e.Lambda);
        const double lo = 0.5 * (1.0 + sobolev_exponent(N));
        const double nt = dim_like_plus(N, es);
        const double hi = nt > 2.1 ? 1.02 * sobolev_exponent(nt) : 80.0;
        RadialProblem fam = RadialProblem::pucci_plus(N, es, 0.5 * (lo + hi));
        return critical_exponent(fam, lo, hi, 1e-3).p_star;
    };

    const double p_star_end = p_star_plus(e.lambda);
    if (!(p_target < p_star_end)) {
        std::ostringstream os;
        os << "homotopy_in_s: p_target=" << p_target
           << " is not below p*_+(lambda)=" << p_star_end;
        throw std::invalid_argument(os.str());
    }

    // Linear-in-s exponent path from a safe Laplacian-end value down to
    // p_target, kept below 0.95 of the local critical exponent throughout.
    const double q_start = std::min(p_target, 0.8 * sobolev_exponent(N));

    HomotopyResult out;
    Eigen::VectorXd seed;
    const bool degenerate = e.lambda == e.Lambda;
    const int n_steps = degenerate ? 1 : steps;
    for (int k = 0; k <= (degenerate ? 0 : n_steps); ++k) {
        const double frac = degenerate ? 1.0 : static_cast<double>(k) / n_steps;
        const double s = e.Lambda + (e.lambda - e.Lambda) * frac;
        const bool last = degenerate || k == n_steps;
        const double ps = last ? p_star_end : p_star_plus(s);
        const double q_linear = q_start + (p_target - q_start) * frac;
        const double q = last ? p_target : std::min(q_linear, 0.95 * ps);
        const EllipticityPair es(s, e.Lambda);
        try {
            if (seed.size() == 0) {
                RadialProfile u0 = dirichlet_radial_solution(RadialProblem::pucci_plus(N, es, q));
                seed = seed_from_profile(grid, u0);
            }
            DiscreteSolution sol = solve_semilinear(grid, SemilinearKind::PucciPlus, es, q,
                                                    seed, tol);
            seed = sol.values;
            out.path.push_back({s, q, ps, sol.residual_norm, sol.newton_iters});
            if (last) out.final = std::move(sol);
        } catch (const std::exception& err) {
            std::ostringstream os;
            os << "homotopy step failed at s=" << s << ": " << err.what();
            throw HomotopyFailure(os.str(), s);
        }
    }
    return out;
}

}  // namespace pucci
