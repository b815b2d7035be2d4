#include "vortexlab/biot_savart.hpp"

#include <cmath>
#include <limits>

namespace vlab {

PeriodicField2 velocity_from_vorticity(const PeriodicField& omega) {
    if (omega.n == 0) throw ConfigError("velocity_from_vorticity: empty grid");
    auto& ws = shared_workspace(omega.n, omega.L);
    return ws.velocity_fields(ws.forward(omega));
}

Vec2 biot_savart_direct(const PeriodicField& omega, const Vec2& at) {
    const double h = omega.h();
    const double da = omega.cell_area();
    Vec2 u = Vec2::Zero();
    for (int j = 0; j < omega.n; ++j)
        for (int i = 0; i < omega.n; ++i) {
            double w = omega.values(i, j);
            if (w == 0.0) continue;
            Vec2 d = at - Vec2(omega.x(i), omega.y(j));
            if (d.squaredNorm() < 0.25 * h * h) continue;  // self cell
            u += (w * da) * kb_eval(d);
        }
    return u;
}

EllipticBoundReport elliptic_bound_check(const PeriodicField& omega,
                                         double mean_zero_tol) {
    EllipticBoundReport rep;
    const double da = omega.cell_area();
    const double mass = omega.integral();
    const double wmax = omega.max_abs();
    if (wmax == 0.0) {
        rep.applicable = false;
        rep.ratio_l4 = rep.ratio_l1linf = rep.ratio_weighted =
            std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    rep.mean_zero = std::abs(mass) <= mean_zero_tol * wmax;

    PeriodicField2 u = velocity_from_vorticity(omega);
    rep.u_inf = u.max_norm();
    rep.w_l4_l43 = omega.lp_norm(4.0) + omega.lp_norm(4.0 / 3.0);
    rep.w_l1_linf = omega.l1_norm() + wmax;
    rep.ratio_l4 = rep.u_inf / rep.w_l4_l43;
    rep.ratio_l1linf = rep.u_inf / rep.w_l1_linf;

    if (rep.mean_zero) {
        const double c = 0.5 * omega.L;
        double wu = 0.0, s4 = 0.0, s43 = 0.0;
        for (int j = 0; j < omega.n; ++j)
            for (int i = 0; i < omega.n; ++i) {
                double r2 = sq(omega.x(i) - c) + sq(omega.y(j) - c);
                double wgt = 1.0 + r2;
                double speed = std::hypot(u.x.values(i, j), u.y.values(i, j));
                wu = std::max(wu, wgt * speed);
                double ww = wgt * std::abs(omega.values(i, j));
                s4 += std::pow(ww, 4.0) * da;
                s43 += std::pow(ww, 4.0 / 3.0) * da;
            }
        rep.wu_inf = wu;
        rep.ww_l4_l43 = std::pow(s4, 0.25) + std::pow(s43, 0.75);
        rep.ratio_weighted = rep.wu_inf / rep.ww_l4_l43;
    } else {
        rep.ratio_weighted = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace vlab
