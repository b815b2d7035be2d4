#pragma once

#include "vortexlab/common.hpp"
#include "vortexlab/ode45.hpp"

#include <optional>
#include <vector>

namespace vlab {

/// A point-vortex configuration: positions z_i and circulations alpha_i.
struct VortexConfig {
    std::vector<Vec2> positions;
    std::vector<double> circulations;

    int count() const { return static_cast<int>(positions.size()); }
    void validate() const;

    double min_separation() const;
    /// Center of vorticity sum_i alpha_i z_i.
    Vec2 vorticity_center() const;
    /// Kirchhoff Hamiltonian sum_{i<j} alpha_i alpha_j log|z_i - z_j|.
    double hamiltonian() const;
};

/// Parameters of the viscous vortex system in logarithmic time tau = ln(t+1).
struct ViscousParams {
    double kappa = 0.0;  // Knudsen / viscosity scale, >= 0
    double eta0 = 1.0;   // Boltzmann viscosity constant, > 0
    void validate() const;
};

enum class TimeVariable { Physical, Logarithmic };

/// Sampled trajectory of an N-vortex integration plus separation diagnostics.
struct TrajectorySet {
    TimeVariable time_variable = TimeVariable::Physical;
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;  // positions[k][i] at times[k]
    std::vector<double> min_separation;
    double d_T = 0.0;        // inf of min_separation over the run
    bool aborted = false;    // collapse below threshold

    VortexConfig at(std::size_t k, const VortexConfig& base) const;
    /// Positions at query time by cubic Hermite interpolation of samples.
    std::vector<Vec2> interpolate(double t) const;
};

/// RHS of the Helmholtz-Kirchhoff system: velocity of each vortex induced
/// by all the others through the Biot-Savart kernel.
std::vector<Vec2> hk_rhs(const VortexConfig& config);

/// RHS of the viscous vortex system in tau:
///   dy_i/dtau = e^tau sum_{j!=i} alpha_j K_B(y_ij) (1 - e^{-|y_ij|^2/(4 kappa eta0 e^tau)})
/// Coincident positions are regular (the mollifier wins) and contribute zero.
std::vector<Vec2> viscous_rhs(const VortexConfig& config, double tau,
                              const ViscousParams& params);

struct IntegrateOptions {
    double tolerance = 1e-10;
    /// Abort when min_separation < collapse_factor * initial min_separation.
    double collapse_factor = 1e-6;
    /// Store at most this many samples (thinning happens on the fly).
    double sample_dt = 0.0;  // 0 => store every accepted step
};

/// Integrate the inviscid HK system in physical time t on [0, horizon].
TrajectorySet integrate_hk(const VortexConfig& config, double horizon,
                           const IntegrateOptions& opt = {});

/// Integrate the inviscid system written in tau (dy/dtau = e^tau * hk_rhs).
TrajectorySet integrate_hk_tau(const VortexConfig& config, double tau_star,
                               const IntegrateOptions& opt = {});

/// Integrate the viscous vortex system in tau on [0, tau_star].
TrajectorySet integrate_viscous(const VortexConfig& config, double tau_star,
                                const ViscousParams& params,
                                const IntegrateOptions& opt = {});

struct DriftEntry {
    double kappa = 0.0;
    double drift = 0.0;      // max_i sup_tau |y_i^kappa - y_i|
    bool valid = true;       // false if either system collapsed
};

struct DriftStudy {
    std::vector<DriftEntry> entries;
    /// OLS fit of log(drift) against 1/kappa over the valid entries
    /// (needs >= 4 of them); slope is expected negative.
    std::optional<double> semilog_slope;
    double eta0 = 1.0;
    double tau_star = 0.0;
};

/// Compare viscous trajectories against the inviscid one over [0, tau_star]
/// for each kappa in the list.
DriftStudy drift_study(const VortexConfig& config,
                       const std::vector<double>& kappa_list, double tau_star,
                       double eta0 = 1.0, double tolerance = 1e-11);

} // namespace vlab
