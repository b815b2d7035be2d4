#pragma once

#include "vortexlab/biot_savart.hpp"
#include "vortexlab/vortex.hpp"

#include <functional>

namespace vlab {

/// Context handed to passenger forcing callbacks at each RK stage.
struct StageContext {
    double t = 0.0;
    const SpectralWorkspace* ws = nullptr;
    const SpectralField* omega_hat = nullptr;  // total vorticity at the stage
    const SpectralField* ux_hat = nullptr;
    const SpectralField* uy_hat = nullptr;
    const PeriodicField* ux = nullptr;
    const PeriodicField* uy = nullptr;
};

/// A scalar field advected by the shared velocity:
///   d_t w + advect_coef * (u . grad w) = diffusivity * Lap w + forcing
/// Diffusion integrates exactly (integrating factor); advection + forcing
/// go through the explicit stages.
struct PassengerField {
    SpectralField w;
    double advect_coef = 1.0;
    double diffusivity = 0.0;
    std::function<SpectralField(const StageContext&)> forcing;  // may be empty
};

/// Vorticity-form 2D Navier-Stokes state with the per-vortex passive
/// decomposition omega = sum_i alpha_i omega_i.
struct NSState {
    double t = 0.0;
    VortexConfig config;
    ViscousParams params;
    SpectralField omega;                 // total vorticity
    std::vector<SpectralField> omega_i;  // unit-mass per-vortex components
    std::vector<PassengerField> passengers;
    int n = 0;
    double L = 0.0;

    double nu() const { return params.kappa * params.eta0; }
};

struct NsInitOptions {
    /// Require at least this many cells across the core diameter 2*sqrt(4 nu).
    double cells_per_core = 8.0;
    /// Require vortex centers at least this many core widths from the walls.
    double wall_margin_cores = 10.0;
};

/// Gaussian initial data: omega_i = unit-mass Gaussian of width^2 = 4 kappa eta0
/// centered at z_{i,0}; omega = sum alpha_i omega_i.
NSState init_gaussian_vortices(const VortexConfig& config, const ViscousParams& params,
                               int n, double L, const NsInitOptions& opt = {});

/// Pseudo-spectral solver: 2/3-dealiased advection, exact diffusion factor,
/// Lawson (integrating factor) RK4 in time.
class NsSolver {
public:
    NsSolver(int n, double L);

    const SpectralWorkspace& workspace() const { return *ws_; }

    /// One RK4 step of size dt; throws NumericalError on CFL violation
    /// (dt > cfl_limit * h / |u|_inf) or non-finite values.
    void step(NSState& state, double dt) const;

    /// Largest admissible step for the current state.
    double suggested_dt(const NSState& state, double cfl = 0.45) const;

    /// Advance to time t_end with fixed steps no larger than dt_cap.
    void advance(NSState& state, double t_end, double dt_cap,
                 const std::function<void(const NSState&)>& on_step = {}) const;

    PeriodicField2 velocity(const NSState& state) const;

    double cfl_limit = 0.9;

private:
    SpectralWorkspace* ws_;  // cached, thread-local lifetime
    /// RHS of all fields minus their diffusion parts, at given state.
    std::vector<SpectralField> explicit_rhs(const NSState& state, double t,
                                            const std::vector<SpectralField>& fields,
                                            double* umax_out) const;
};

/// The exact widened-Gaussian reference
///   sum_i alpha_i /(4 pi nu (t+1)) exp(-|x-z_i|^2/(4 nu (t+1))).
PeriodicField lamb_oseen_sum(int n, double L, const std::vector<Vec2>& centers,
                             const std::vector<double>& circulations, double nu,
                             double t);

/// L1 distance between the solver vorticity and the widened Gaussians
/// centered at the trajectory positions interpolated to state.t.
double l1_lamb_oseen_error(const NSState& state, const TrajectorySet& traj);
double l1_lamb_oseen_error_at(const NSState& state, const std::vector<Vec2>& centers);

/// Unit-mass centroid of the per-vortex field omega_i (core tracker).
Vec2 vortex_centroid(const NSState& state, int i);

struct PointwiseErrorReport {
    PeriodicField error;      // |u - sum alpha K_B(x - z_i)| where d >= cutoff, else 0
    double max_error = 0.0;
    double fitted_C = 0.0;
    double fitted_C0 = 0.0;
    bool empty = false;       // cutoff region empty
};

/// Pointwise velocity error against the point-vortex field, restricted to
/// d(x) = min_i |x - z_i| >= cutoff, with the bound-shape fit
///   error <= C ( min(1/d, e^{-dT^2/(C0 kappa)}/d^2) + e^{-d^2/(16 kappa (t+1))}/d + sqrt(kappa) ).
PointwiseErrorReport pointwise_velocity_error(const NSState& state,
                                              const std::vector<Vec2>& centers,
                                              double cutoff, double d_T);

/// sup over a ring |x - center_i| = ring_radius of |u - sum alpha K_B|,
/// evaluated by band-limited Fourier summation at off-grid points.
double ring_velocity_error(const NSState& state, const std::vector<Vec2>& centers,
                           double ring_radius, int n_samples = 64);

} // namespace vlab
