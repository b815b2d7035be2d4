#include "vortexlab/vortex.hpp"

#include "vortexlab/kernels.hpp"
#include "vortexlab/slopes.hpp"

#include <cmath>
#include <limits>

namespace vlab {

void VortexConfig::validate() const {
    if (positions.empty() || positions.size() != circulations.size())
        throw ConfigError("VortexConfig: need N >= 1 positions with matching circulations");
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if ((positions[i] - positions[j]).squaredNorm() == 0.0)
                throw DegenerateConfigError("VortexConfig: coincident vortices");
}

double VortexConfig::min_separation() const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            d = std::min(d, (positions[i] - positions[j]).norm());
    return d;
}

Vec2 VortexConfig::vorticity_center() const {
    Vec2 c = Vec2::Zero();
    for (int i = 0; i < count(); ++i) c += circulations[i] * positions[i];
    return c;
}

double VortexConfig::hamiltonian() const {
    double h = 0.0;
    for (int i = 0; i < count(); ++i)
        for (int j = i + 1; j < count(); ++j)
            h += circulations[i] * circulations[j] *
                 std::log((positions[i] - positions[j]).norm());
    return h;
}

void ViscousParams::validate() const {
    if (kappa < 0.0) throw ConfigError("ViscousParams: kappa must be >= 0");
    if (eta0 <= 0.0) throw ConfigError("ViscousParams: eta0 must be > 0");
}

std::vector<Vec2> hk_rhs(const VortexConfig& config) {
    config.validate();
    const int n = config.count();
    std::vector<Vec2> v(n, Vec2::Zero());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            v[i] += config.circulations[j] *
                    kb_eval(config.positions[i] - config.positions[j]);
        }
    return v;
}

std::vector<Vec2> viscous_rhs(const VortexConfig& config, double tau,
                              const ViscousParams& params) {
    params.validate();
    if (params.kappa <= 0.0)
        throw ConfigError("viscous_rhs: kappa must be > 0");
    const int n = config.count();
    const double et = std::exp(tau);
    const double w2 = 4.0 * params.kappa * params.eta0 * et;
    std::vector<Vec2> v(n, Vec2::Zero());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            v[i] += et * config.circulations[j] *
                    mollified_kb(config.positions[i] - config.positions[j], w2);
        }
    return v;
}

namespace {

VecX pack(const std::vector<Vec2>& z) {
    VecX y(2 * z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        y[2 * i] = z[i].x();
        y[2 * i + 1] = z[i].y();
    }
    return y;
}

std::vector<Vec2> unpack(const VecX& y) {
    std::vector<Vec2> z(y.size() / 2);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = {y[2 * i], y[2 * i + 1]};
    return z;
}

double min_sep(const VecX& y) {
    double d = std::numeric_limits<double>::infinity();
    const auto n = y.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d = std::min(d, std::hypot(y[2 * i] - y[2 * j], y[2 * i + 1] - y[2 * j + 1]));
    return d;
}

template <typename Rhs>
TrajectorySet run(Rhs&& rhs, const VortexConfig& config, double horizon,
                  const IntegrateOptions& opt, TimeVariable tv) {
    config.validate();
    TrajectorySet traj;
    traj.time_variable = tv;
    const double d0 = config.min_separation();
    const double collapse = opt.collapse_factor * d0;
    traj.d_T = std::numeric_limits<double>::infinity();

    Ode45Options oopt;
    oopt.rel_tol = opt.tolerance;
    oopt.abs_tol = opt.tolerance * 1e-2;
    oopt.max_dt = std::max(horizon / 16.0, 1e-6);

    double last_stored = -std::numeric_limits<double>::infinity();
    auto observer = [&](double t, const VecX& y) {
        double d = min_sep(y);
        traj.d_T = std::min(traj.d_T, d);
        if (d < collapse) {
            traj.aborted = true;
            traj.times.push_back(t);
            traj.positions.push_back(unpack(y));
            traj.min_separation.push_back(d);
            return false;
        }
        if (t - last_stored >= opt.sample_dt || t >= horizon) {
            traj.times.push_back(t);
            traj.positions.push_back(unpack(y));
            traj.min_separation.push_back(d);
            last_stored = t;
        }
        return true;
    };
    ode45(rhs, 0.0, horizon, pack(config.positions), oopt, observer);
    return traj;
}

} // namespace

TrajectorySet integrate_hk(const VortexConfig& config, double horizon,
                           const IntegrateOptions& opt) {
    if (horizon <= 0.0) throw ConfigError("integrate_hk: horizon must be > 0");
    if (opt.tolerance <= 0.0) throw ConfigError("integrate_hk: tolerance must be > 0");
    VortexConfig c = config;
    auto rhs = [&](double, const VecX& y) {
        c.positions = unpack(y);
        return pack(hk_rhs(c));
    };
    return run(rhs, config, horizon, opt, TimeVariable::Physical);
}

TrajectorySet integrate_hk_tau(const VortexConfig& config, double tau_star,
                               const IntegrateOptions& opt) {
    if (tau_star <= 0.0) throw ConfigError("integrate_hk_tau: tau_star must be > 0");
    VortexConfig c = config;
    auto rhs = [&](double tau, const VecX& y) {
        c.positions = unpack(y);
        auto v = hk_rhs(c);
        double et = std::exp(tau);
        for (auto& vi : v) vi *= et;
        return pack(v);
    };
    return run(rhs, config, tau_star, opt, TimeVariable::Logarithmic);
}

TrajectorySet integrate_viscous(const VortexConfig& config, double tau_star,
                                const ViscousParams& params,
                                const IntegrateOptions& opt) {
    if (tau_star <= 0.0) throw ConfigError("integrate_viscous: tau_star must be > 0");
    params.validate();
    VortexConfig c = config;
    auto rhs = [&](double tau, const VecX& y) {
        c.positions = unpack(y);
        return pack(viscous_rhs(c, tau, params));
    };
    return run(rhs, config, tau_star, opt, TimeVariable::Logarithmic);
}

VortexConfig TrajectorySet::at(std::size_t k, const VortexConfig& base) const {
    VortexConfig c = base;
    c.positions = positions.at(k);
    return c;
}

std::vector<Vec2> TrajectorySet::interpolate(double t) const {
    if (times.empty()) throw ConfigError("TrajectorySet::interpolate: empty trajectory");
    if (t <= times.front()) return positions.front();
    if (t >= times.back()) return positions.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    double t0 = times[k], t1 = times[k + 1];
    double s = (t - t0) / (t1 - t0);
    std::vector<Vec2> out(positions[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 - s) * positions[k][i] + s * positions[k + 1][i];
    return out;
}

DriftStudy drift_study(const VortexConfig& config,
                       const std::vector<double>& kappa_list, double tau_star,
                       double eta0, double tolerance) {
    DriftStudy study;
    study.eta0 = eta0;
    study.tau_star = tau_star;

    IntegrateOptions opt;
    opt.tolerance = tolerance;
    TrajectorySet base = integrate_hk_tau(config, tau_star, opt);

    for (double kappa : kappa_list) {
        if (kappa <= 0.0) throw ConfigError("drift_study: kappa must be > 0");
        DriftEntry e;
        e.kappa = kappa;
        ViscousParams vp{kappa, eta0};
        TrajectorySet visc = integrate_viscous(config, tau_star, vp, opt);
        if (base.aborted || visc.aborted) {
            e.valid = false;
            study.entries.push_back(e);
            continue;
        }
        double drift = 0.0;
        for (std::size_t k = 0; k < visc.times.size(); ++k) {
            auto ref = base.interpolate(visc.times[k]);
            for (std::size_t i = 0; i < ref.size(); ++i)
                drift = std::max(drift, (visc.positions[k][i] - ref[i]).norm());
        }
        e.drift = drift;
        study.entries.push_back(e);
    }

    std::vector<double> xs, ys;
    for (const auto& e : study.entries)
        if (e.valid && e.drift > 0.0) {
            xs.push_back(1.0 / e.kappa);
            ys.push_back(e.drift);
        }
    if (xs.size() >= 4)
        study.semilog_slope = fit_slope(xs, ys, FitMode::SemiLogX).slope;
    return study;
}

} // namespace vlab
