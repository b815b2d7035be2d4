#pragma once

#include "vortexlab/cheb.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vlab {

/// Tensor-product Gauss-Legendre lattice on [-Vmax, Vmax]^3, flattened with
/// x fastest. Weights positive; integral of the Maxwellian close to 1.
struct VelocityGrid {
    double Vmax = 8.0;
    int n_axis = 32;
    ArrX axis, axis_w;           // 1D nodes and weights
    ArrX X, Y, Z, W, R2, E4;     // per-node coordinates, weight, |v|^2, e^{-|v|^2/4}

    VelocityGrid(int n_axis, double Vmax);
    long size() const { return static_cast<long>(X.size()); }
    double maxwellian_mass() const;
    Vec3 node(long i) const { return {X[i], Y[i], Z[i]}; }
};

using VelocityGridPtr = std::shared_ptr<const VelocityGrid>;

/// Distribution function on the lattice; optionally carries the analytic
/// evaluator it was sampled from (used by the collision quadratures, which
/// need off-lattice values).
struct DistFn {
    VelocityGridPtr grid;
    ArrX values;
    std::function<double(const Vec3&)> analytic;  // may be empty

    DistFn() = default;
    explicit DistFn(VelocityGridPtr g) : grid(std::move(g)), values(ArrX::Zero(grid->size())) {}
    DistFn(VelocityGridPtr g, std::function<double(const Vec3&)> f);

    double inner(const DistFn& o) const { return (grid->W * values * o.values).sum(); }
    double norm() const { return std::sqrt((grid->W * values * values).sum()); }
    /// sup |m f| with m = e^{rho0 |v|^2} (weighted sup-norm tag).
    double weighted_sup(double rho0) const {
        return (values.abs() * (rho0 * grid->R2).exp()).maxCoeff();
    }
};

double maxwellian(const Vec3& v);

/// Hard-sphere collision frequency nu(v) = 2 pi int |v - v*| mu(v*) dv*
/// (the sphere integral is analytic); evaluated by radial quadrature.
double nu_eval(double speed);
inline double nu_eval(const Vec3& v) { return nu_eval(v.norm()); }

/// Radial reduction of the linearized operator: per angular degree l the
/// kernel acts on radial profiles through smooth 1D kernels. The kernel
/// constants (C1, C2) are calibrated so L annihilates the collision
/// invariants; residuals are reported.
class RadialCollision {
public:
    struct Options {
        double Vmax = 16.0;   // radial truncation of the velocity modulus
        int n_r = 160;        // radial nodes (Chebyshev-Gauss)
        int n_s = 80;         // Gauss nodes for the angular s-integral
        int n_panel = 64;     // Gauss nodes per radial panel
        int l_max = 3;
    };

    RadialCollision() : RadialCollision(Options{}) {}
    explicit RadialCollision(const Options& opt);

    const ArrX& r() const { return r_; }
    const ArrX& w() const { return w_; }          // plain dr weights
    ArrX measure() const { return w_ * r_.square(); }
    double C1() const { return C1_; }
    double C2() const { return C2_; }
    /// ||L phi||_{L^2_v} for the five invariants (3 distinct radial forms).
    const std::array<double, 3>& calibration_residuals() const { return calib_res_; }

    ArrX sqmu() const;                             // sqrt(mu)(r) radial profile
    /// Apply the angular-l kernel block K_l to a radial profile.
    ArrX apply_K(int l, const ArrX& f) const;
    /// Apply L = nu - K on the l-block.
    ArrX apply_L(int l, const ArrX& f) const;
    /// Solve L a = q on the l-block with the null radial profiles of that
    /// block deflated; relative plug-back residual returned via *resid.
    ArrX solve_L(int l, const ArrX& q, double* resid = nullptr) const;

    /// Burnett profiles: A_{ij} = alpha(r) vhat_i vhat_j sqrt(mu)-structure
    /// with alpha solving the l=2 block; B_j likewise on l=1; the l=3 block
    /// backs the third-order flux profiles.
    ArrX alpha_profile() const;   // solves L_2 a = r^2 sqmu
    ArrX beta_profile() const;    // solves L_1 b = r (r^2-5)/2 sqmu
    ArrX t3_profile() const;      // solves L_3 t = r^3 sqmu

    double eta0() const;          // (4 pi / 15) int r^2 (r^2 sqmu) alpha dr
    double etac() const;          // (4 pi / 3)  int r^2 q_B beta dr

    const ArrX& nu_values() const { return nu_; }

    /// Barycentric evaluation of a radial table at arbitrary radius.
    double eval(const ArrX& table, double radius) const;

private:
    Options opt_;
    ArrX r_, w_, bary_, nu_;
    std::vector<MatX> K1_, K2_;   // per-l kernel blocks (weights folded in)
    double C1_ = 0.0, C2_ = 0.0;
    std::array<double, 3> calib_res_{};
    void build_kernels();
    void calibrate();
};

/// Dense-lattice linearized operator with the desingularized symmetric
/// quadrature: the kernel singularity is handled by an exact diagonal
/// correction from the radial reduction. Symmetric with respect to the
/// lattice inner product by construction.
class CollisionOp3D {
public:
    CollisionOp3D(VelocityGridPtr grid, std::shared_ptr<const RadialCollision> radial);

    const VelocityGrid& grid() const { return *grid_; }
    const RadialCollision& radial() const { return *radial_; }

    DistFn apply_K(const DistFn& f) const;
    DistFn apply_L(const DistFn& f) const;

    /// Orthonormalized collision invariants on the lattice.
    const std::vector<DistFn>& null_basis() const { return null_basis_; }
    /// P f and the (a, b, c) coefficients against the raw invariants.
    DistFn project_P(const DistFn& f, double* a = nullptr, Vec3* b = nullptr,
                     double* c = nullptr) const;
    DistFn project_out(const DistFn& f) const;  // (I - P) f

    struct CgResult {
        DistFn x;
        int iterations = 0;
        double residual = 0.0;
        double projection_residual = 0.0;  // |P h| / |h| of the input
        bool curvature_stop = false;  // hit the quadrature-floor indefiniteness
        std::vector<double> history;
    };
    /// Conjugate-gradient solve of L x = (I-P) h on the orthogonal
    /// complement of the invariants; throws NumericalError on stagnation.
    CgResult solve_Linv(const DistFn& h, double tol = 1e-9, int max_iter = 200) const;

private:
    VelocityGridPtr grid_;
    std::shared_ptr<const RadialCollision> radial_;
    ArrX nu_, diag_;   // nu(v_i) and the desingularizing diagonal
    std::vector<DistFn> null_basis_;
};

struct KernelBoundReport {
    double rho0 = 0.0, N0 = 0.0;
    double supremum = 0.0;        // sup_v (1+|v|) int |K| m(v)/m(v*) (1+|v-v*|^N0)
    double refined_supremum = 0.0;
    double stability = 0.0;       // relative change under quadrature doubling
    bool diverged = false;
    std::array<double, 2> grad_constants{};  // fitted C for theta = 1/16, 1/10
};

/// Weighted kernel integrability (the m-ratio bound) plus the pointwise
/// Grad-kernel domination check at random pairs.
KernelBoundReport kernel_bound_check(const RadialCollision& radial, double rho0,
                                     double N0, unsigned seed = 2024);

/// Transport coefficients with the index-structure consistency report.
struct TransportReport {
    double eta0 = 0.0, etac = 0.0;
    double structure_residual = 0.0;   // relative deviation from the bracket pattern
    double ratio_1111_1212 = 0.0;      // expected 4/3
    double offdiag_bb = 0.0;           // |<Bhat_1, B_2>| / etac
    double eta0_refined = 0.0, etac_refined = 0.0;  // doubled radial resolution
};
TransportReport transport_coefficients(const RadialCollision& radial,
                                       const CollisionOp3D* op3d = nullptr,
                                       double* cross_check_gap = nullptr);

} // namespace vlab
