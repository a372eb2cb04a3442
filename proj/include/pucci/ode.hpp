#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "pucci/errors.hpp"

namespace pucci {

using OdeState2 = std::array<double, 2>;

struct OdeControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-6;
    long max_steps = 4'000'000;
};

// Dormand-Prince 5(4) embedded pair on a two-component state.
// Single step: writes the 5th-order update into y5 and returns the scaled
// error norm (accept when <= 1).
template <class Rhs>
double dopri5_step(const Rhs& f, double t, const OdeState2& y, double h,
                   OdeState2& y5, double atol, double rtol) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeState2 k1 = f(t, y), tmp;
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    OdeState2 k2 = f(t + c2 * h, tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    OdeState2 k3 = f(t + c3 * h, tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    OdeState2 k4 = f(t + c4 * h, tmp);
    for (int i = 0; i < 2; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    OdeState2 k5 = f(t + c5 * h, tmp);
    for (int i = 0; i < 2; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    OdeState2 k6 = f(t + h, tmp);
    for (int i = 0; i < 2; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    OdeState2 k7 = f(t + h, y5);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double q = ei / sc;
        err += q * q;
    }
    return std::sqrt(err / 2.0);
}

struct CrossingEvent {
    double t;          // location of the first y[0] = 0 down-crossing
    OdeState2 state;   // state at the crossing (component 0 ~ 0)
};

namespace detail {

// Locate the zero of component 0 inside an accepted step [t, t+h] by
// bisection on partial re-steps from the step start; the partial step is a
// 5th-order-consistent continuous extension of the accepted step.
template <class Rhs>
CrossingEvent locate_crossing(const Rhs& f, double t, const OdeState2& y, double h,
                              const OdeState2& y_end, const OdeControl& ctl) {
    double lo = 0.0, hi = h;
    OdeState2 ym = y_end;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * h; ++it) {
        const double mid = 0.5 * (lo + hi);
        OdeState2 yt;
        dopri5_step(f, t, y, mid, yt, ctl.atol, ctl.rtol);
        if (yt[0] <= 0.0) {
            hi = mid;
            ym = yt;
        } else {
            lo = mid;
        }
    }
    return CrossingEvent{t + hi, ym};
}

}  // namespace detail

// Adaptive integration of y' = f(t, y) from (t0, y0) to t_end (t increasing).
//
// next_output(t) must return the smallest requested output time > t (or
// +inf); accepted steps land exactly on those times.  The observer is called
// with every accepted (t, y) including the initial point.
//
// If component 0 crosses from positive to <= 0 within an accepted step, the
// crossing is located, reported to the observer, and returned; integration
// stops there.  Returns nullopt if y[0] stays positive up to t_end.
//
// Throws IntegrationFailure on step-size underflow or step budget exhaustion.
template <class Rhs, class NextOutput, class Observer>
std::optional<CrossingEvent> integrate_adaptive(const Rhs& f, double t0, OdeState2 y0,
                                                double t_end, const OdeControl& ctl,
                                                NextOutput&& next_output,
                                                Observer&& observe) {
    double t = t0;
    OdeState2 y = y0;
    double h_prop = ctl.h_init;
    observe(t, y);
    long steps = 0;
    while (t < t_end) {
        if (++steps > ctl.max_steps)
            throw IntegrationFailure("integrate_adaptive: step budget exhausted", t, y);
        const double target = std::min(t_end, next_output(t));
        const bool clipped = t + h_prop >= target;
        const double h = clipped ? target - t : h_prop;
        OdeState2 y5;
        const double err = dopri5_step(f, t, y, h, y5, ctl.atol, ctl.rtol);
        if (err <= 1.0) {
            if (y[0] > 0.0 && y5[0] <= 0.0) {
                const CrossingEvent ev = detail::locate_crossing(f, t, y, h, y5, ctl);
                observe(ev.t, ev.state);
                return ev;
            }
            t += h;
            y = y5;
            observe(t, y);
            if (!clipped) {
                double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
                h_prop = h * std::min(5.0, std::max(0.2, fac));
            }
        } else {
            double fac = 0.9 * std::pow(err, -0.2);
            h_prop = h * std::max(0.1, fac);
            if (h_prop < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationFailure("integrate_adaptive: step size underflow", t, y);
        }
    }
    return std::nullopt;
}

inline double no_output(double) { return std::numeric_limits<double>::infinity(); }

// Convenience overload without intermediate output points.
template <class Rhs, class Observer>
std::optional<CrossingEvent> integrate_adaptive(const Rhs& f, double t0, OdeState2 y0,
                                                double t_end, const OdeControl& ctl,
                                                Observer&& observe) {
    return integrate_adaptive(f, t0, y0, t_end, ctl, no_output,
                              std::forward<Observer>(observe));
}

}  // namespace pucci
