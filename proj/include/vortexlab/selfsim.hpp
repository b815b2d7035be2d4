#pragma once

#include "vortexlab/cheb.hpp"
#include "vortexlab/vortex.hpp"

#include <memory>
#include <vector>

namespace vlab {

/// Shared radial collocation grid on [0, R_max] for fields of the
/// self-similar variable X, with per-mode operator machinery.
/// Angular dependence is Fourier: w(r, theta) = Re sum_n mult_n a_n(r) e^{i n theta}.
struct RadialGrid {
    ChebGrid cheb;           // Lobatto nodes including r = 0 and r = R
    double R = 12.0;

    explicit RadialGrid(int n_nodes = 160, double R_max = 12.0)
        : cheb(n_nodes, 0.0, R_max), R(R_max) {}
    int size() const { return cheb.size(); }
    const ArrX& r() const { return cheb.x; }
};

using RadialGridPtr = std::shared_ptr<const RadialGrid>;
using CVecX = Eigen::VectorXcd;

/// Field on the polar grid: complex mode amplitudes a_n(r_k), n = 0..n_max.
/// Real field = a_0 + 2 Re sum_{n>=1} a_n e^{i n theta}.
struct PolarField {
    RadialGridPtr grid;
    Eigen::MatrixXcd amps;  // (n_r, n_max+1)

    PolarField() = default;
    PolarField(RadialGridPtr g, int n_max)
        : grid(std::move(g)), amps(Eigen::MatrixXcd::Zero(grid->size(), n_max + 1)) {}

    int n_modes() const { return static_cast<int>(amps.cols()); }
    int n_r() const { return static_cast<int>(amps.rows()); }

    /// Weighted norm ||w||_{L^2_p}, p = e^{|X|^2/4}, truncated at r <= r_cap
    /// (the weight amplifies roundoff beyond the certified decay range).
    double norm_p(double r_cap = -1.0) const;
    double inner_p(const PolarField& other, double r_cap = -1.0) const;
    /// ||grad w||_{L^2_p}^2 (Dirichlet part of the weighted energy).
    double grad_sq_p(double r_cap = -1.0) const;

    double eval(double r, double theta) const;
    /// max over grid nodes of |w| e^{gamma r^2 / 4}.
    double weighted_sup(double gamma) const;
    /// largest |a_n| on the outer 10% of nodes, for decay certificates.
    double tail_magnitude() const;
    /// Chebyshev coefficient tail (relative), for resolution checks.
    double spectral_tail() const;
};

/// The Gaussian profile G as a PolarField (mode 0).
PolarField gauss_polar(RadialGridPtr g, int n_max = 8);

/// Fokker-Planck-type operator: L w = Lap w + X/2 . grad w + w.
PolarField op_L_apply(const PolarField& w);

/// Transport linearization about (G, u^G):
/// Lambda w = u^G . grad w + (K_B * w) . grad G. Requires mode-0 mean zero.
PolarField op_Lambda_apply(const PolarField& w);

/// Dirichlet identity data: <L w, w>_p, -||grad w||_p^2 + ||w||_p^2.
struct DirichletCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};
DirichletCheck dirichlet_identity(const PolarField& w, double r_cap = 10.0);

/// Solve the radial profile equation (regular at 0, decaying at R):
///   Omega'' + Omega'/r + ((r^2/4)/(e^{r^2/4}-1) - n^2/r^2) Omega = rhs(r)
/// with rhs = (2 pi / n) r^n e^{-r^2/4} by default.
struct OmegaProfile {
    ArrX omega;          // solution at the radial nodes
    double residual = 0.0;   // relative plug-back residual at interior nodes
    double fitted_exponent = 0.0;  // local r^n exponent near the origin
};
OmegaProfile solve_omega_profile(const RadialGrid& g, int n);
OmegaProfile solve_omega_profile(const RadialGrid& g, int n, const ArrX& rhs);

/// Smooth cutoff ramp: 0 for tau <= a, 1 for tau >= 2a, C^infinity between;
/// a = (eta0 kappa)^alpha with alpha = 1/2.
double cutoff_phi(double tau, double kappa_eta0, double alpha = 0.5);
double cutoff_phi_deriv(double tau, double kappa_eta0, double alpha = 0.5);

/// Interaction geometry of vortex i against the others at one instant.
struct InteractionTerm {
    double amp2 = 0.0;       // coefficient of r^2 e^{-r^2/4} sin(2 psi_j)
    double amp3 = 0.0;       // coefficient of r^3 e^{-r^2/4} sin(3 psi_j)
    double theta = 0.0;      // orientation angle of eta_ij
    double damp2 = 0.0;      // d/dtau of the amplitudes and angle
    double damp3 = 0.0;
    double dtheta = 0.0;
    double eta_norm = 0.0;   // |y_ij| / sqrt(kappa eta0 e^tau)
};

/// Assemble the leading interaction terms T_i from the viscous vortex
/// geometry at log-time tau (amplitudes, orientations, tau-derivatives).
std::vector<InteractionTerm> interaction_terms(const VortexConfig& config, int i,
                                               const std::vector<Vec2>& velocities,
                                               double tau, double kappa_eta0);

/// T_i as a PolarField from assembled terms.
PolarField interaction_field(RadialGridPtr g, const std::vector<InteractionTerm>& terms,
                             int n_max = 8);

/// Stream-function tables of a polar vorticity field; eval returns the
/// induced velocity in Cartesian components, with the multipole
/// continuation beyond the grid radius.
struct PolarVelocity {
    RadialGridPtr grid;
    Eigen::MatrixXcd psi, dpsi;
    ArrX gamma0;  // enclosed circulation of mode 0
    Vec2 eval(double r, double theta) const;
};

PolarVelocity velocity_of(const PolarField& w);

struct CorrectorResult {
    PolarField w;                    // w_{i,a}
    PolarField dw_dtau;              // partial_tau w_{i,a}
    PolarVelocity vel;               // velocity tables of w
    std::vector<double> contraction; // successive iterate distances
    double mean = 0.0;               // integral of w over the plane
    double decay_gamma = 0.9;
    bool decay_certified = false;    // |w| <= C e^{-gamma r^2/4} on outer nodes
    double solve_residual = 0.0;     // || kappa eta0 (1-L) w + Lambda w + T ||_p
};

/// Build the corrector by the fixed-point iteration
///   w <- Lambda^{-1}( -T - kappa eta0 (1 - L) w ),
/// stopping when successive iterates differ by < 1e-10 in L^2_p or after
/// 50 rounds; throws NumericalError (with the contraction history in the
/// message) if the iteration expands.
CorrectorResult build_corrector(RadialGridPtr g, double kappa_eta0,
                                const std::vector<InteractionTerm>& terms,
                                int n_max = 8);

struct ResidualReport {
    PolarField field;        // R_{i,app} on the grid
    double weighted_sup = 0.0;   // sup |R| e^{gamma |X|^2/4}
    double ratio_to_kappa = 0.0;
    double s_weighted_sup = 0.0; // same for the Taylor tail S_i
    double phi = 0.0;
};

/// Assemble the approximation residual
///   R = kappa eta0 (d_tau - L) w + (Lambda w + T_i) + S_i
///     + sum_j u_{j,a}(X + eta_ij) . grad G
///     + kappa eta0 phi [ sum_j u_{j,a}(X + eta_ij) + u_{i,a} ] . grad w
/// where S_i is the exact interaction minus its leading terms.
ResidualReport residual_riapp(const CorrectorResult& self,
                              const std::vector<CorrectorResult>& others,
                              const std::vector<InteractionTerm>& terms,
                              double kappa, double eta0, double tau,
                              double gamma = 0.9);

/// Taylor-tail check: S_ij sampled against kappa e^{-gamma |X|^2/4}.
double taylor_tail_sup(const RadialGrid& g, const InteractionTerm& term,
                       double kappa_eta0, double gamma = 0.9);

void write_polar_csv(const PolarField& w, const std::string& path);

struct ExpansionCheck {
    double norm_with_corrector = 0.0;    // || w_bar - G - kappa eta0 phi w_a ||_p
    double norm_without = 0.0;           // || w_bar - G ||_p
    double phi = 0.0;
};

} // namespace vlab
