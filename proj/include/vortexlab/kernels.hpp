#pragma once

#include "vortexlab/common.hpp"

#include <cmath>

namespace vlab {

/// Biot-Savart kernel K_B(x) = x^perp / (2 pi |x|^2), x^perp = (-x2, x1).
inline Vec2 kb_eval(const Vec2& x) {
    double r2 = x.squaredNorm();
    if (r2 == 0.0)
        throw DegenerateConfigError("kb_eval: singular point x = 0");
    double s = 1.0 / (2.0 * pi * r2);
    return {-x.y() * s, x.x() * s};
}

/// Gaussian vortex profile G(X) = exp(-|X|^2/4) / (4 pi), unit mass.
inline double gauss_profile(const Vec2& X) {
    return std::exp(-0.25 * X.squaredNorm()) / (4.0 * pi);
}

/// (1 - exp(-r^2/4)) / r^2 with the removable singularity at r = 0.
inline double oseen_mollifier_over_r2(double r2) {
    if (r2 < 1e-12) return 0.25 - r2 / 32.0;
    return -std::expm1(-0.25 * r2) / r2;
}

/// Velocity of the unit Gaussian vortex,
/// u^G(X) = K_B(X) (1 - exp(-|X|^2/4)); u^G(0) = 0.
inline Vec2 oseen_velocity(const Vec2& X) {
    double m = oseen_mollifier_over_r2(X.squaredNorm()) / (2.0 * pi);
    return {-X.y() * m, X.x() * m};
}

/// Mollified point-vortex kernel K_B(x)(1 - exp(-|x|^2 / w2)); finite at 0.
inline Vec2 mollified_kb(const Vec2& x, double w2) {
    double r2 = x.squaredNorm();
    double m;
    if (r2 < 1e-12 * w2)
        m = (1.0 - 0.5 * r2 / w2) / w2;
    else
        m = -std::expm1(-r2 / w2) / r2;
    m /= 2.0 * pi;
    return {-x.y() * m, x.x() * m};
}

} // namespace vlab
