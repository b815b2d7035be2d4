#pragma once

#include "vortexlab/kernels.hpp"
#include "vortexlab/spectral.hpp"

namespace vlab {

/// Spectral inversion u = grad^perp(Delta^{-1} omega) on the periodic box.
/// The zero mode of omega is dropped (mean removal), so curl(u) equals
/// omega minus its mean.
PeriodicField2 velocity_from_vorticity(const PeriodicField& omega);

/// Free-space Biot-Savart velocity of a gridded compactly supported
/// vorticity, evaluated at one point by direct quadrature. The self-cell
/// is skipped (odd kernel). Intended for verification, not inner loops.
Vec2 biot_savart_direct(const PeriodicField& omega, const Vec2& at);

struct EllipticBoundReport {
    double u_inf = 0.0;
    double w_l4_l43 = 0.0;       // ||w||_{L^4} + ||w||_{L^{4/3}}
    double w_l1_linf = 0.0;      // ||w||_{L^1} + ||w||_{L^inf}
    bool mean_zero = false;
    double wu_inf = 0.0;         // ||(1+|x|^2) u||_inf   (mean-zero only)
    double ww_l4_l43 = 0.0;      // ||(1+|x|^2) w||_{L^4 cap L^{4/3}}
    // ratios; NaN when not applicable (zero field / not mean-zero)
    double ratio_l4 = 0.0;       // u_inf / w_l4_l43
    double ratio_l1linf = 0.0;   // u_inf / w_l1_linf
    double ratio_weighted = 0.0; // wu_inf / ww_l4_l43
    bool applicable = true;
};

/// Norm ratios behind the velocity-from-vorticity elliptic estimates.
/// The field is treated as compactly supported on the box centered at L/2;
/// weights use the distance to the box center.
EllipticBoundReport elliptic_bound_check(const PeriodicField& omega,
                                         double mean_zero_tol = 1e-10);

} // namespace vlab
