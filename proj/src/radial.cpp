#include "pucci/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pucci/errors.hpp"
#include "pucci/ode.hpp"

namespace pucci {

namespace {

constexpr double kOriginStart = 1e-8;

double positive_pow(double v, double p) {
    return v > 0.0 ? std::pow(v, p) : 0.0;
}

// phi(s) = w_pos * s for s >= 0, w_neg * s for s < 0 (increasing, piecewise
// linear); solving phi(x) = z gives x = z / w_pos when z >= 0 else z / w_neg.
double phi_apply(double s, double w_pos, double w_neg) {
    return s >= 0.0 ? w_pos * s : w_neg * s;
}

double phi_invert(double z, double w_pos, double w_neg) {
    return z >= 0.0 ? z / w_pos : z / w_neg;
}

// Solves phi(u'') = -[(N-1) phi(du/r) + (u_+)^p] for u''.
double pucci_second_derivative(double y_over_r, double up, int N,
                               double w_pos, double w_neg) {
    const double bracket = (N - 1) * phi_apply(y_over_r, w_pos, w_neg) + up;
    return phi_invert(-bracket, w_pos, w_neg);
}

}  // namespace

RadialProblem RadialProblem::dim_like(double n_tilde, double p) {
    if (!(n_tilde > 1.0)) throw std::invalid_argument("RadialProblem: need Ntilde > 1");
    if (!(p > 1.0)) throw std::invalid_argument("RadialProblem: need p > 1");
    return RadialProblem{RadialKind::DimLike, n_tilde, 0, EllipticityPair(1.0, 1.0), p};
}

RadialProblem RadialProblem::pucci_plus(int N, const EllipticityPair& e, double p) {
    if (N < 2) throw std::invalid_argument("RadialProblem: need N >= 2");
    if (!(p > 1.0)) throw std::invalid_argument("RadialProblem: need p > 1");
    return RadialProblem{RadialKind::PucciPlus, 0.0, N, e, p};
}

RadialProblem RadialProblem::pucci_minus(int N, const EllipticityPair& e, double p) {
    if (N < 2) throw std::invalid_argument("RadialProblem: need N >= 2");
    if (!(p > 1.0)) throw std::invalid_argument("RadialProblem: need p > 1");
    return RadialProblem{RadialKind::PucciMinus, 0.0, N, e, p};
}

double RadialProblem::series_denominator() const {
    // Near the origin both Hessian eigenvalues equal u''(0) < 0, so the
    // concave branch of the operator applies.
    switch (kind) {
        case RadialKind::DimLike: return n_tilde;
        case RadialKind::PucciPlus: return ell.lambda * dim;
        case RadialKind::PucciMinus: return ell.Lambda * dim;
    }
    return 0.0;
}

std::string RadialProblem::describe() const {
    std::ostringstream os;
    switch (kind) {
        case RadialKind::DimLike:
            os << "dimlike(Ntilde=" << n_tilde << ", p=" << p << ")";
            break;
        case RadialKind::PucciPlus:
            os << "pucci+(N=" << dim << ", lambda=" << ell.lambda
               << ", Lambda=" << ell.Lambda << ", p=" << p << ")";
            break;
        case RadialKind::PucciMinus:
            os << "pucci-(N=" << dim << ", lambda=" << ell.lambda
               << ", Lambda=" << ell.Lambda << ", p=" << p << ")";
            break;
    }
    return os.str();
}

double rhs_dimlike(double r, double v, double dv, double n_tilde, double p) {
    if (!(r > 0.0))
        throw SingularPointError("rhs_dimlike: r <= 0 belongs to the series start");
    return -(n_tilde - 1.0) / r * dv - positive_pow(v, p);
}

double rhs_pucci_plus(double r, double u, double du, int N, const EllipticityPair& e,
                      double p) {
    if (!(r > 0.0))
        throw SingularPointError("rhs_pucci_plus: r <= 0 belongs to the series start");
    return pucci_second_derivative(du / r, positive_pow(u, p), N, e.Lambda, e.lambda);
}

double rhs_pucci_minus(double r, double u, double du, int N, const EllipticityPair& e,
                       double p) {
    if (!(r > 0.0))
        throw SingularPointError("rhs_pucci_minus: r <= 0 belongs to the series start");
    return pucci_second_derivative(du / r, positive_pow(u, p), N, e.lambda, e.Lambda);
}

double radial_rhs(const RadialProblem& prob, double r, double v, double dv) {
    switch (prob.kind) {
        case RadialKind::DimLike: return rhs_dimlike(r, v, dv, prob.n_tilde, prob.p);
        case RadialKind::PucciPlus: return rhs_pucci_plus(r, v, dv, prob.dim, prob.ell, prob.p);
        case RadialKind::PucciMinus: return rhs_pucci_minus(r, v, dv, prob.dim, prob.ell, prob.p);
    }
    return 0.0;
}

double RadialProfile::max_abs_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::size_t RadialProfile::locate(double r) const {
    // index of the interval [radii[i], radii[i+1]] containing r
    auto it = std::upper_bound(radii.begin(), radii.end(), r);
    if (it == radii.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - radii.begin()) - 1;
    return std::min(i, radii.size() - 2);
}

double RadialProfile::value_at(double r) const {
    if (radii.size() < 2) return values.empty() ? 0.0 : values.front();
    r = std::clamp(r, radii.front(), radii.back());
    const std::size_t i = locate(r);
    const double h = radii[i + 1] - radii[i];
    const double t = (r - radii[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[i] + (t3 - 2 * t2 + t) * h * derivs[i] +
           (-2 * t3 + 3 * t2) * values[i + 1] + (t3 - t2) * h * derivs[i + 1];
}

double RadialProfile::deriv_at(double r) const {
    if (radii.size() < 2) return derivs.empty() ? 0.0 : derivs.front();
    r = std::clamp(r, radii.front(), radii.back());
    const std::size_t i = locate(r);
    const double h = radii[i + 1] - radii[i];
    const double t = (r - radii[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * values[i] / h + (3 * t2 - 4 * t + 1) * derivs[i] +
            (6 * t - 6 * t2) * values[i + 1] / h + (3 * t2 - 2 * t) * derivs[i + 1]);
}

namespace {

// Series start: v(r0) = v0 - v0^p r0^2 / (2 d), v'(r0) = -v0^p r0 / d.
OdeState2 series_state(const RadialProblem& prob, double v0, double r0) {
    const double d = prob.series_denominator();
    const double up = positive_pow(v0, prob.p);
    return {v0 - up * r0 * r0 / (2.0 * d), -up * r0 / d};
}

struct RadialRhs {
    const RadialProblem& prob;
    OdeState2 operator()(double r, const OdeState2& y) const {
        return {y[1], radial_rhs(prob, r, y[0], y[1])};
    }
};

}  // namespace

ShootOutcome shoot(const RadialProblem& prob, double v0, double rmax, double tol) {
    if (!(v0 > 0.0)) throw std::invalid_argument("shoot: need v0 > 0");
    if (!(rmax > 0.0)) throw std::invalid_argument("shoot: need rmax > 0");
    const double r0 = kOriginStart;
    ShootOutcome out;
    out.profile.radii.push_back(0.0);
    out.profile.values.push_back(v0);
    out.profile.derivs.push_back(0.0);

    OdeControl ctl;
    ctl.rtol = tol;
    ctl.atol = std::min(tol, 1e-12);
    ctl.h_init = 1e-6;

    auto record = [&](double r, const OdeState2& y) {
        out.profile.radii.push_back(r);
        out.profile.values.push_back(y[0]);
        out.profile.derivs.push_back(y[1]);
    };

    auto ev = integrate_adaptive(RadialRhs{prob}, r0, series_state(prob, v0, r0), rmax,
                                 ctl, record);
    if (ev) {
        out.kind = ShootOutcome::Kind::Crossing;
        out.first_zero = ev->t;
    } else {
        out.kind = ShootOutcome::Kind::Positive;
        out.horizon = rmax;
    }
    return out;
}

Classification classify_trajectory(const RadialProblem& prob, double v0,
                                   const ClassifyParams& cp) {
    const double r0 = kOriginStart;
    OdeControl ctl;
    ctl.rtol = cp.tol;
    ctl.atol = 1e-14;
    ctl.h_init = 1e-6;

    OdeState2 y_end{};
    double r_end = 0.0;
    auto track = [&](double r, const OdeState2& y) {
        r_end = r;
        y_end = y;
    };
    auto ev = integrate_adaptive(RadialRhs{prob}, r0, series_state(prob, v0, r0),
                                 cp.r_switch, ctl, track);
    if (ev) return {TrajectoryClass::Crossing, std::log(ev->t)};

    // Far field in Emden-Fowler variables.  With a = 2/(p-1) and
    // x(t) = r^a v(r): v'' and v'/r pick up the factor r^{-a-2}, exactly the
    // scaling of v^p, so the transformed system is autonomous and the
    // piecewise operator structure carries over unchanged.
    const double a = 2.0 / (prob.p - 1.0);
    const double ts = std::log(r_end);
    const double ra = std::pow(r_end, a);
    OdeState2 z0{ra * y_end[0], ra * (a * y_end[0] + r_end * y_end[1])};

    auto ef_rhs = [&](double, const OdeState2& z) -> OdeState2 {
        const double Y = z[1] - a * z[0];
        const double up = positive_pow(z[0], prob.p);
        double X = 0.0;
        switch (prob.kind) {
            case RadialKind::DimLike:
                X = -((prob.n_tilde - 1.0) * Y + up);
                break;
            case RadialKind::PucciPlus:
                X = pucci_second_derivative(Y, up, prob.dim, prob.ell.Lambda, prob.ell.lambda);
                break;
            case RadialKind::PucciMinus:
                X = pucci_second_derivative(Y, up, prob.dim, prob.ell.lambda, prob.ell.Lambda);
                break;
        }
        return {z[1], X + (2.0 * a + 1.0) * z[1] - a * (a + 1.0) * z[0]};
    };

    OdeControl ctl2 = ctl;
    ctl2.h_init = 1e-3;
    auto ev2 = integrate_adaptive(ef_rhs, ts, z0, cp.t_max, ctl2, [](double, const OdeState2&) {});
    if (ev2) return {TrajectoryClass::Crossing, ev2->t};
    return {TrajectoryClass::Positive, 0.0};
}

RadialProfile dirichlet_radial_solution(const RadialProblem& prob, int grid_points,
                                        double tol) {
    if (grid_points < 9)
        throw std::invalid_argument("dirichlet_radial_solution: grid too coarse");
    ShootOutcome unit = shoot(prob, 1.0, 50.0, tol);
    if (!unit.crossed()) {
        // A genuinely supercritical trajectory never crosses; verify with the
        // far-field classifier before giving up, since near-critical
        // subcritical shots can cross beyond the plain horizon.
        Classification cls = classify_trajectory(prob, 1.0, {50.0, 60.0, tol});
        // Crossings beyond ~1e6 are indistinguishable at working precision
        // from the threshold itself (the near-critical trajectory shadows a
        // homoclinic orbit); no representable Dirichlet rescale exists.
        if (cls.cls == TrajectoryClass::Positive || cls.log_first_zero > std::log(1e6))
            throw SupercriticalError(prob.p,
                                     "dirichlet_radial_solution: no positive Dirichlet "
                                     "solution at " + prob.describe());
        unit = shoot(prob, 1.0, 1.5 * std::exp(cls.log_first_zero), tol);
    }
    const double R0 = unit.first_zero;
    // v_gamma(r) = gamma v(gamma^{(p-1)/2} r); gamma = R0^{2/(p-1)} moves the
    // zero to r = 1.  Valid for the Pucci kinds by positive 1-homogeneity.
    const double gamma = std::pow(R0, 2.0 / (prob.p - 1.0));

    RadialProfile prof;
    prof.radii.resize(grid_points);
    prof.values.resize(grid_points);
    prof.derivs.resize(grid_points);
    const double h = 1.0 / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) prof.radii[i] = i * h;
    prof.values[0] = gamma;
    prof.derivs[0] = 0.0;

    const double r0 = kOriginStart;
    OdeControl ctl;
    ctl.rtol = tol;
    ctl.atol = 1e-15;  // the 1/r term amplifies absolute derivative errors
    ctl.h_init = 1e-6;

    int next = 1;
    auto next_output = [&](double) {
        return next < grid_points ? prof.radii[next] : 2.0;
    };
    auto record = [&](double r, const OdeState2& y) {
        if (next < grid_points && r >= prof.radii[next] - 1e-13) {
            prof.values[next] = y[0];
            prof.derivs[next] = y[1];
            ++next;
        }
    };
    integrate_adaptive(RadialRhs{prob}, r0, series_state(prob, gamma, r0), 1.0, ctl,
                       next_output, record);
    if (next < grid_points)
        // the rescaled shot crossed a hair before r = 1 (zero located to
        // integrator accuracy); pad the boundary sample
        while (next < grid_points) {
            prof.values[next] = 0.0;
            prof.derivs[next] = prof.derivs[next - 1];
            ++next;
        }
    return prof;
}

double profile_ode_residual(const RadialProfile& prof, const RadialProblem& prob) {
    const std::size_t n = prof.size();
    if (n < 7) throw std::invalid_argument("profile_ode_residual: grid too small");
    double worst = 0.0;
    double scale = 1.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double h = prof.radii[i + 1] - prof.radii[i];
        // 4th-order central difference of v' gives v''
        const double vpp = (-prof.derivs[i + 2] + 8.0 * prof.derivs[i + 1] -
                            8.0 * prof.derivs[i - 1] + prof.derivs[i - 2]) /
                           (12.0 * h);
        const double rhs = radial_rhs(prob, prof.radii[i], prof.values[i], prof.derivs[i]);
        worst = std::max(worst, std::abs(vpp - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    return worst / scale;
}

ExponentResult critical_exponent(const RadialProblem& family, double p_lo, double p_hi,
                                 double tol, const ClassifyParams& cp, int scan_points) {
    if (!(p_lo > 1.0) || !(p_hi > p_lo))
        throw InvalidBracketError("critical_exponent: need 1 < p_lo < p_hi");
    if (!(tol > 0.0)) throw std::invalid_argument("critical_exponent: need tol > 0");

    auto classify_at = [&](double p) {
        RadialProblem prob = family;
        prob.p = p;
        return classify_trajectory(prob, 1.0, cp).cls;
    };

    ExponentResult res;
    res.scan.reserve(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        const double p = p_lo + (p_hi - p_lo) * i / (scan_points - 1);
        res.scan.emplace_back(p, classify_at(p));
    }
    // monotone = a (possibly empty) run of crossings followed by positives
    res.scan_monotone = true;
    bool seen_positive = false;
    for (const auto& [p, c] : res.scan) {
        if (c == TrajectoryClass::Positive) seen_positive = true;
        else if (seen_positive) res.scan_monotone = false;
    }

    if (res.scan.front().second != TrajectoryClass::Crossing)
        throw InvalidBracketError("critical_exponent: p_lo does not cross; widen the bracket");
    if (res.scan.back().second != TrajectoryClass::Positive)
        throw InvalidBracketError("critical_exponent: p_hi is not positive; widen the bracket");

    double lo = p_lo, hi = p_hi;
    int steps = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (classify_at(mid) == TrajectoryClass::Crossing)
            lo = mid;
        else
            hi = mid;
        ++steps;
    }
    res.p_star = 0.5 * (lo + hi);
    res.bisection_steps = steps;
    return res;
}

}  // namespace pucci
