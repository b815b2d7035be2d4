#pragma once

#include "vortexlab/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace vlab {

/// Dormand-Prince 5(4) embedded pair with PI step-size control.
/// State is a flat Eigen vector; the RHS is any callable f(t, y) -> VecX.
struct Ode45Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_dt = 1e-3;
    double max_dt = 0.1;
    long max_steps = 50'000'000;
};

struct Ode45Result {
    bool completed = true;   // false if the observer aborted the run
    long n_steps = 0;
    long n_rejected = 0;
};

/// Integrate y' = f(t,y) from t0 to t1. `observe(t, y)` is called after the
/// initial state and each accepted step; returning false aborts integration.
template <typename Rhs, typename Observer>
Ode45Result ode45(Rhs&& f, double t0, double t1, VecX y,
                  const Ode45Options& opt, Observer&& observe) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // 4th-order weights (for the error estimate)
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Ode45Result res;
    double t = t0;
    double dt = std::min(opt.initial_dt, t1 - t0);
    VecX k1 = f(t, y);
    if (!observe(t, y)) { res.completed = false; return res; }

    double err_prev = 1.0;
    while (t < t1) {
        dt = std::min(dt, t1 - t);
        VecX y2 = y + dt * (a21 * k1);
        VecX k2 = f(t + c2 * dt, y2);
        VecX y3 = y + dt * (a31 * k1 + a32 * k2);
        VecX k3 = f(t + c3 * dt, y3);
        VecX y4 = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
        VecX k4 = f(t + c4 * dt, y4);
        VecX y5 = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        VecX k5 = f(t + c5 * dt, y5);
        VecX y6 = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        VecX k6 = f(t + dt, y6);
        VecX ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        VecX k7 = f(t + dt, ynew);  // FSAL
        VecX errv = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(errv[i]) / sc);
        }
        if (err <= 1.0) {
            t += dt;
            y.swap(ynew);
            k1.swap(k7);
            ++res.n_steps;
            if (!observe(t, y)) { res.completed = false; return res; }
            // PI controller (Gustafsson)
            double fac = 0.9 * std::pow(err + 1e-16, -0.7 / 5.0) *
                         std::pow(err_prev + 1e-16, 0.4 / 5.0);
            dt *= std::clamp(fac, 0.2, 5.0);
            dt = std::min(dt, opt.max_dt);
            err_prev = err;
        } else {
            ++res.n_rejected;
            dt *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
        if (res.n_steps + res.n_rejected > opt.max_steps)
            throw NumericalError("ode45: step budget exhausted");
        if (dt < 1e-15 * std::max(1.0, std::abs(t)))
            throw NumericalError("ode45: step size underflow");
    }
    return res;
}

} // namespace vlab
