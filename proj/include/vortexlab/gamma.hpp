#pragma once

#include "vortexlab/collision.hpp"

namespace vlab {

using VFun = std::function<double(const Vec3&)>;

/// Quadrature sizes for the bilinear collision integral.
struct GammaRule {
    int n_axis = 18;    // Gauss nodes per v* axis
    double Vq = 8.5;    // v* truncation
    int n_c = 8;        // Gauss nodes per polar half (the |cos| kink splits)
    int n_phi = 12;     // uniform azimuthal nodes
};

/// Gain-minus-loss quadrature of the symmetrized bilinear collision term
///   Gamma(f,g)(v0) = (1/2) int |(v0-v*).s| sqrt(mu(v*))
///        [ f' g*' + g' f*' - f g* - g f* ] ds dv*.
double gamma_at(const Vec3& v0, const VFun& f, const VFun& g,
                const GammaRule& rule = {});

/// Gamma(f, g) sampled on the lattice (parallel over nodes). Uses the
/// analytic evaluators when the inputs carry them, otherwise the
/// polynomial-lattice interpolant.
DistFn gamma_bilinear(const DistFn& f, const DistFn& g, const GammaRule& rule = {});

/// Off-lattice evaluation of a gridded DistFn by per-axis barycentric
/// interpolation (the lattice is a Gauss point set).
double lattice_eval(const DistFn& f, const Vec3& v);

/// Angular-channel profiles of Gamma(e_k, h) for tensor-profile h, extracted
/// on a circle: Gamma(e_1, H_12)(r, phi-plane) = q1(r) sin-channel +
/// q3(r) third-harmonic channel.
struct GammaChannels {
    ArrX q1, q3;  // on the radial collision grid
};

/// Channels of Gamma(e_2, Ahat_12)-type pairs where the second argument is
/// scalar_profile(r) * vhat_1 vhat_2 sqrt-mu-structure.
GammaChannels gamma_channels_momentum_flux(const RadialCollision& radial,
                                           const ArrX& profile_over_r2,
                                           const GammaRule& rule = {});

/// Everything the hierarchy assembly needs from velocity space, persisted as
/// a versioned JSON artifact.
struct BurnettArtifact {
    int version = 1;
    double Vmax = 0.0;
    int n_r = 0;
    double C1 = 0.0, C2 = 0.0;
    std::array<double, 3> calib_res{};
    double eta0 = 0.0, etac = 0.0;
    ArrX r;
    ArrX alpha;   // A_ij radial profile
    ArrX beta;    // B_j radial profile
    ArrX t3;      // l=3 flux profile
    // L^{-1}(I-P)Gamma(e_k, Ahat_ab) channels (l=1 and l=3) and the same
    // for the A_ab-profile second argument
    ArrX h1A, h3A, h1B, h3B;
    // L^{-1}(I-P)(v_c A_ab) channels
    ArrX hva1, hva3;
    double g1 = 0.0;  // <B_j, Gamma(e_k, Ahat_ab)> isotropic scalar
    double g2 = 0.0;  // <B_j, Gamma(e_k, A_ab)> isotropic scalar
    std::string grid_tag;

    void save(const std::string& path) const;
    static BurnettArtifact load(const std::string& path);
};

/// Assemble the artifact from a calibrated radial operator (runs the
/// bilinear quadratures; minutes of compute).
BurnettArtifact build_burnett_artifact(const RadialCollision& radial,
                                       const GammaRule& rule = {});

} // namespace vlab
