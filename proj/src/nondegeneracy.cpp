#include "pucci/nondegeneracy.hpp"

#include <cmath>
#include <stdexcept>

#include "pucci/errors.hpp"
#include "pucci/ode.hpp"

namespace pucci {

double sphere_eigenvalue(int k, int N) {
    if (k < 0) throw std::invalid_argument("sphere_eigenvalue: need k >= 0");
    if (N < 2) throw std::invalid_argument("sphere_eigenvalue: need N >= 2");
    return -static_cast<double>(k) * (k + N - 2);
}

double indicial_exponent(double n_tilde, double c) {
    // s^2 + (nt-2)s + c = 0; c < 0 forces one positive and one negative root.
    if (!(c < 0.0))
        throw std::logic_error("indicial_exponent: coupling must be negative");
    const double b = n_tilde - 2.0;
    return 0.5 * (-b + std::sqrt(b * b - 4.0 * c));
}

double ModeProblem::mode_coupling() const {
    const double lam_k = sphere_eigenvalue(k, dim);
    return form == QForm::Plus ? ell.lambda * lam_k / ell.Lambda
                               : ell.Lambda * lam_k / ell.lambda;
}

namespace {

constexpr int kLinearGrid = 1025;

// Sup-norm residual of u'' + (nt-1)/r u' + u^p / denom = 0 on the stored
// grid, u'' reconstructed by 4th-order differences of the sampled u'.
double base_residual(const RadialProfile& u, double n_tilde, double p, double denom) {
    double worst = 0.0;
    const std::size_t n = u.size();
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double h = u.radii[i + 1] - u.radii[i];
        const double upp = (-u.derivs[i + 2] + 8.0 * u.derivs[i + 1] -
                            8.0 * u.derivs[i - 1] + u.derivs[i - 2]) /
                           (12.0 * h);
        const double r = u.radii[i];
        const double rhs = -(n_tilde - 1.0) / r * u.derivs[i] -
                           std::pow(std::max(u.values[i], 0.0), p) / denom;
        worst = std::max(worst, std::abs(upp - rhs));
    }
    return worst;
}

struct LinearOdeResult {
    double end_value;
    double max_abs;
    RadialProfile prof;
};

// Integrates y'' = rhs(r, y, y') from (r_start, y0, dy0) to r = 1, sampling
// on a uniform grid and tracking max |y|.  Solutions of the linearized
// equations may change sign, so no crossing detection here.
template <class SecondDeriv>
LinearOdeResult integrate_linear(const SecondDeriv& f, double r_start, double y0,
                                 double dy0, double origin_value, double tol) {
    LinearOdeResult out;
    out.prof.radii.resize(kLinearGrid);
    out.prof.values.assign(kLinearGrid, 0.0);
    out.prof.derivs.assign(kLinearGrid, 0.0);
    const double hg = 1.0 / (kLinearGrid - 1);
    for (int i = 0; i < kLinearGrid; ++i) out.prof.radii[i] = i * hg;
    out.prof.values[0] = origin_value;

    double max_abs = std::abs(y0);
    int next = 1;
    while (next < kLinearGrid && out.prof.radii[next] <= r_start) ++next;

    auto rhs = [&](double r, const OdeState2& y) -> OdeState2 {
        return {y[1], f(r, y[0], y[1])};
    };

    double t = r_start;
    OdeState2 y{y0, dy0};
    double h_prop = 1e-7;
    while (t < 1.0) {
        const double target = next < kLinearGrid ? out.prof.radii[next] : 1.0;
        const bool clipped = t + h_prop >= target;
        const double hh = clipped ? target - t : h_prop;
        OdeState2 y5;
        const double err = dopri5_step(rhs, t, y, hh, y5, 1e-14, tol);
        if (err <= 1.0) {
            t = clipped ? target : t + hh;
            y = y5;
            max_abs = std::max(max_abs, std::abs(y[0]));
            if (clipped && next < kLinearGrid) {
                out.prof.values[next] = y[0];
                out.prof.derivs[next] = y[1];
                ++next;
            }
            if (!clipped) {
                double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
                h_prop = hh * std::min(5.0, std::max(0.2, fac));
            }
        } else {
            h_prop = hh * std::max(0.1, 0.9 * std::pow(err, -0.2));
            if (h_prop < 1e-16)
                throw IntegrationFailure("integrate_linear: step underflow", t, y);
        }
    }
    out.end_value = y[0];
    out.max_abs = max_abs;
    return out;
}

}  // namespace

NondegReport radial_nondegeneracy(const RadialProfile& v, double n_tilde, double p,
                                  double tol, double mu) {
    if (v.size() < 9 || v.radii.front() != 0.0)
        throw InvalidBaseError("radial_nondegeneracy: malformed base profile");
    {
        RadialProblem check = RadialProblem::dim_like(n_tilde, p);
        if (profile_ode_residual(v, check) > 1e-6 * std::max(1.0, v.max_abs_value()))
            throw InvalidBaseError("radial_nondegeneracy: base profile residual too large");
    }
    const double v0 = v.values.front();
    const double c0 = mu * p * std::pow(v0, p - 1.0);
    // series start: h(r) = 1 - c0 r^2 / (2 nt) + O(r^4)
    const double r0 = 1e-6;
    const double h0 = 1.0 - c0 * r0 * r0 / (2.0 * n_tilde);
    const double dh0 = -c0 * r0 / n_tilde;

    auto f = [&](double r, double h, double dh) {
        const double vv = std::max(v.value_at(r), 0.0);
        return -(n_tilde - 1.0) / r * dh - mu * p * std::pow(vv, p - 1.0) * h;
    };
    LinearOdeResult lin = integrate_linear(f, r0, h0, dh0, 1.0, 1e-10);

    NondegReport rep;
    rep.h_at_1 = lin.end_value;
    rep.max_abs_h = lin.max_abs;
    rep.nondegenerate = std::abs(lin.end_value) > tol * lin.max_abs;
    rep.h = std::move(lin.prof);
    return rep;
}

ModeReport mode_nondegeneracy(const ModeProblem& mp, double tol) {
    if (mp.k < 1)
        throw std::invalid_argument("mode_nondegeneracy: k = 0 is handled by "
                                    "radial_nondegeneracy");
    const double nt = mp.n_tilde();
    const double denom = mp.potential_denominator();
    if (mp.base.size() < 9 || mp.base.radii.front() != 0.0)
        throw InvalidBaseError("mode_nondegeneracy: malformed base profile");
    if (base_residual(mp.base, nt, mp.p, denom) >
        1e-8 * std::max(1.0, std::pow(mp.base.max_abs_value(), mp.p)))
        throw InvalidBaseError("mode_nondegeneracy: base profile residual too large");

    const double coupling = mp.mode_coupling();
    const double sigma = indicial_exponent(nt, coupling);

    const double r0 = 1e-6;
    const double a0 = std::pow(r0, sigma);
    const double da0 = sigma * std::pow(r0, sigma - 1.0);

    auto f = [&](double r, double a, double da) {
        const double u = std::max(mp.base.value_at(r), 0.0);
        return -(nt - 1.0) / r * da - coupling * a / (r * r) -
               mp.p / denom * std::pow(u, mp.p - 1.0) * a;
    };
    LinearOdeResult lin = integrate_linear(f, r0, a0, da0, 0.0, 1e-10);

    ModeReport rep;
    rep.a_at_1 = lin.end_value;
    rep.max_abs_a = lin.max_abs;
    rep.sigma = sigma;
    rep.nondegenerate = std::abs(lin.end_value) > tol * lin.max_abs;
    rep.mode = std::move(lin.prof);
    return rep;
}

SturmReport sturm_cross_check(const ModeProblem& mp) {
    SturmReport rep{};
    const double nt = mp.n_tilde();
    const double denom = mp.potential_denominator();

    // (1) w = u0' satisfies w'' + (nt-1)/r w' - (nt-1)/r^2 w
    //     + (p/denom) u0^{p-1} w = 0 (differentiated base equation).
    {
        double worst = 0.0;
        const auto& u = mp.base;
        const std::size_t n = u.size();
        for (std::size_t i = 3; i + 3 < n; ++i) {
            const double h = u.radii[i + 1] - u.radii[i];
            const double r = u.radii[i];
            const double w = u.derivs[i];
            // w' = u'' from the base equation, w'' by 4th-order FD of w'
            auto upp = [&](std::size_t j) {
                const double rr = u.radii[j];
                return -(nt - 1.0) / rr * u.derivs[j] -
                       std::pow(std::max(u.values[j], 0.0), mp.p) / denom;
            };
            const double wpp = (-upp(i + 2) + 8.0 * upp(i + 1) - 8.0 * upp(i - 1) +
                                upp(i - 2)) /
                               (12.0 * h);
            const double res = wpp + (nt - 1.0) / r * upp(i) - (nt - 1.0) / (r * r) * w +
                               mp.p / denom *
                                   std::pow(std::max(u.values[i], 0.0), mp.p - 1.0) * w;
            worst = std::max(worst, std::abs(res));
        }
        rep.w_residual = worst;
    }

    // (2) Cross-multiplied identity.  With W = a' w - a w',
    //     (r^{nt-1} W)' = -[coupling + (nt-1)] r^{nt-3} a w,
    // so E(r) = r^{nt-1} W + int [coupling + (nt-1)] t^{nt-3} a w dt is
    // constant.  Checked on [r_lo, end] by trapezoid quadrature, end being
    // the first zero of a_k when one exists.
    ModeReport mode = mode_nondegeneracy(mp);
    const auto& a = mode.mode;
    const auto& u = mp.base;

    double end = 1.0;
    for (std::size_t i = 2; i + 1 < a.size(); ++i) {
        if (a.values[i] > 0.0 && a.values[i + 1] <= 0.0) {
            end = a.radii[i];
            break;
        }
    }
    rep.integration_end = end;

    const double factor = mp.mode_coupling() + (nt - 1.0);
    const double r_lo = 0.05;  // skip the indicial layer where a ~ r^sigma
    const int nq = 4000;       // composite Simpson, even count
    const double hq = (end - r_lo) / nq;
    auto wronskian_term = [&](double r) {
        const double av = a.value_at(r), ad = a.deriv_at(r);
        const double wv = u.deriv_at(r);
        const double upp = -(nt - 1.0) / r * wv -
                           std::pow(std::max(u.value_at(r), 0.0), mp.p) / denom;
        const double W = ad * wv - av * upp;
        return std::pow(r, nt - 1.0) * W;
    };
    auto term_scale_at = [&](double r) {
        const double av = a.value_at(r), ad = a.deriv_at(r);
        const double wv = u.deriv_at(r);
        const double upp = -(nt - 1.0) / r * wv -
                           std::pow(std::max(u.value_at(r), 0.0), mp.p) / denom;
        return std::pow(r, nt - 1.0) * (std::abs(ad * wv) + std::abs(av * upp));
    };
    auto integrand = [&](double r) {
        return factor * std::pow(r, nt - 3.0) * a.value_at(r) * u.deriv_at(r);
    };
    // k = 1 is the translation mode: a_1 is proportional to w, the Wronskian
    // vanishes identically and the drift must be measured against the term
    // magnitudes, not against E itself.
    double acc = 0.0;
    const double e0 = wronskian_term(r_lo);
    double scale = std::max(term_scale_at(r_lo), 1e-12);
    double drift = 0.0;
    for (int i = 0; i + 2 <= nq; i += 2) {
        const double ra = r_lo + i * hq;
        const double rm = ra + hq;
        const double rb = ra + 2 * hq;
        acc += hq / 3.0 * (integrand(ra) + 4.0 * integrand(rm) + integrand(rb));
        const double e = wronskian_term(rb) + acc;
        scale = std::max(scale, term_scale_at(rb));
        drift = std::max(drift, std::abs(e - e0));
    }
    rep.identity_drift = drift / scale;
    rep.ok = rep.w_residual <= 1e-6 * std::max(1.0, std::pow(u.max_abs_value(), mp.p)) &&
             rep.identity_drift <= 1e-6;
    return rep;
}

RadialProfile q_radial_base_solution(int N, const EllipticityPair& e, double p,
                                     QForm form, int grid_points) {
    const double nt = form == QForm::Plus ? dim_like_plus(N, e) : dim_like_minus(N, e);
    const double denom = form == QForm::Plus ? e.Lambda : e.lambda;
    RadialProfile v = dirichlet_radial_solution(RadialProblem::dim_like(nt, p),
                                                grid_points);
    // u0 = denom^{1/(p-1)} v solves denom-scaled radial equation exactly
    const double scale = std::pow(denom, 1.0 / (p - 1.0));
    for (auto& x : v.values) x *= scale;
    for (auto& x : v.derivs) x *= scale;
    return v;
}

}  // namespace pucci
