#include "vortexlab/ns.hpp"

#include <cmath>

namespace vlab {

namespace {

struct FieldMeta {
    double advect_coef = 1.0;
    double diffusivity = 0.0;
    const std::function<SpectralField(const StageContext&)>* forcing = nullptr;
};

std::vector<FieldMeta> collect_meta(const NSState& s) {
    std::vector<FieldMeta> meta;
    meta.push_back({1.0, s.nu(), nullptr});  // total vorticity
    for (std::size_t i = 0; i < s.omega_i.size(); ++i)
        meta.push_back({1.0, s.nu(), nullptr});
    for (const auto& p : s.passengers)
        meta.push_back({p.advect_coef, p.diffusivity, p.forcing ? &p.forcing : nullptr});
    return meta;
}

std::vector<SpectralField> gather(const NSState& s) {
    std::vector<SpectralField> f;
    f.push_back(s.omega);
    for (const auto& w : s.omega_i) f.push_back(w);
    for (const auto& p : s.passengers) f.push_back(p.w);
    return f;
}

void scatter(NSState& s, std::vector<SpectralField>&& f) {
    std::size_t k = 0;
    s.omega = std::move(f[k++]);
    for (auto& w : s.omega_i) w = std::move(f[k++]);
    for (auto& p : s.passengers) p.w = std::move(f[k++]);
}

ArrXX diffusion_factor(const SpectralWorkspace& ws, double nu_dt) {
    const int n = ws.n();
    ArrXX e(n / 2 + 1, n);
    for (int kj = 0; kj < n; ++kj) {
        double ky = ws.k_of(kj);
        for (int ki = 0; ki <= n / 2; ++ki) {
            double kx = ws.k_of(ki);
            e(ki, kj) = std::exp(-nu_dt * (kx * kx + ky * ky));
        }
    }
    return e;
}

} // namespace

NSState init_gaussian_vortices(const VortexConfig& config, const ViscousParams& params,
                               int n, double L, const NsInitOptions& opt) {
    config.validate();
    params.validate();
    if (params.kappa <= 0.0)
        throw ConfigError("init_gaussian_vortices: kappa must be > 0");
    const double nu = params.kappa * params.eta0;
    const double core = 2.0 * std::sqrt(4.0 * nu);  // core diameter
    const double h = L / n;
    if (core / h < opt.cells_per_core) {
        int needed = 1;
        while (needed * core / L < opt.cells_per_core) needed *= 2;
        throw ConfigError("init_gaussian_vortices: unresolved core, need n >= " +
                          std::to_string(needed));
    }
    const double margin = opt.wall_margin_cores * std::sqrt(4.0 * nu);
    for (const auto& z : config.positions)
        if (z.x() < margin || z.x() > L - margin || z.y() < margin || z.y() > L - margin)
            throw ConfigError("init_gaussian_vortices: vortex too close to the boundary");

    NSState s;
    s.t = 0.0;
    s.config = config;
    s.params = params;
    s.n = n;
    s.L = L;
    auto& ws = shared_workspace(n, L);

    PeriodicField total(n, L);
    for (int i = 0; i < config.count(); ++i) {
        PeriodicField wi(n, L);
        const Vec2 z = config.positions[i];
        const double a = 1.0 / (4.0 * pi * nu);
        for (int jj = 0; jj < n; ++jj)
            for (int ii = 0; ii < n; ++ii) {
                double r2 = sq(wi.x(ii) - z.x()) + sq(wi.y(jj) - z.y());
                wi.values(ii, jj) = a * std::exp(-r2 / (4.0 * nu));
            }
        total.values += config.circulations[i] * wi.values;
        s.omega_i.push_back(ws.forward(wi));
    }
    s.omega = ws.forward(total);
    return s;
}

NsSolver::NsSolver(int n, double L) : ws_(&shared_workspace(n, L)) {}

std::vector<SpectralField> NsSolver::explicit_rhs(
    const NSState& state, double t, const std::vector<SpectralField>& fields,
    double* umax_out) const {
    const auto& ws = *ws_;
    SpectralField ux_hat, uy_hat;
    ws.velocity(fields[0], ux_hat, uy_hat);
    PeriodicField ux = ws.inverse(ux_hat);
    PeriodicField uy = ws.inverse(uy_hat);
    if (umax_out) {
        *umax_out = std::sqrt(
            (ux.values * ux.values + uy.values * uy.values).maxCoeff());
    }

    StageContext ctx;
    ctx.t = t;
    ctx.ws = &ws;
    ctx.omega_hat = &fields[0];
    ctx.ux_hat = &ux_hat;
    ctx.uy_hat = &uy_hat;
    ctx.ux = &ux;
    ctx.uy = &uy;

    auto meta = collect_meta(state);
    std::vector<SpectralField> rhs(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        PeriodicField wx = ws.inverse(ws.deriv_x(fields[f]));
        PeriodicField wy = ws.inverse(ws.deriv_y(fields[f]));
        PeriodicField adv(ws.n(), ws.L());
        adv.values = ux.values * wx.values + uy.values * wy.values;
        SpectralField a = ws.forward(adv);
        ws.dealias(a);
        a.c *= -meta[f].advect_coef;
        if (meta[f].forcing) {
            SpectralField g = (*meta[f].forcing)(ctx);
            a.c += g.c;
        }
        rhs[f] = std::move(a);
    }
    return rhs;
}

double NsSolver::suggested_dt(const NSState& state, double cfl) const {
    PeriodicField2 u = velocity(state);
    double umax = u.max_norm();
    double h = state.L / state.n;
    if (umax <= 0.0) return 0.1 * h;
    return cfl * h / umax;
}

void NsSolver::step(NSState& state, double dt) const {
    const auto& ws = *ws_;
    auto meta = collect_meta(state);
    auto y0 = gather(state);

    double umax = 0.0;
    auto k1 = explicit_rhs(state, state.t, y0, &umax);
    const double h = state.L / state.n;
    if (umax * dt > cfl_limit * h)
        throw NumericalError("NsSolver::step: CFL violation, need dt <= " +
                             std::to_string(cfl_limit * h / umax));

    // distinct diffusivities share the k-grid; cache factors per value
    std::vector<ArrXX> E2(meta.size()), E(meta.size());
    for (std::size_t f = 0; f < meta.size(); ++f) {
        E2[f] = diffusion_factor(ws, meta[f].diffusivity * dt * 0.5);
        E[f] = E2[f] * E2[f];
    }

    auto apply = [&](const std::vector<ArrXX>& fac, std::vector<SpectralField> v) {
        for (std::size_t f = 0; f < v.size(); ++f) v[f].c *= fac[f];
        return v;
    };

    // Lawson RK4
    std::vector<SpectralField> s1(y0.size());
    for (std::size_t f = 0; f < y0.size(); ++f) {
        s1[f] = y0[f];
        s1[f].c = (y0[f].c + 0.5 * dt * k1[f].c) * E2[f];
    }
    auto k2 = explicit_rhs(state, state.t + 0.5 * dt, s1, nullptr);

    std::vector<SpectralField> s2(y0.size());
    for (std::size_t f = 0; f < y0.size(); ++f) {
        s2[f] = y0[f];
        s2[f].c = y0[f].c * E2[f] + 0.5 * dt * k2[f].c;
    }
    auto k3 = explicit_rhs(state, state.t + 0.5 * dt, s2, nullptr);

    std::vector<SpectralField> s3(y0.size());
    for (std::size_t f = 0; f < y0.size(); ++f) {
        s3[f] = y0[f];
        s3[f].c = y0[f].c * E[f] + dt * (k3[f].c * E2[f]);
    }
    auto k4 = explicit_rhs(state, state.t + dt, s3, nullptr);

    std::vector<SpectralField> out(y0.size());
    for (std::size_t f = 0; f < y0.size(); ++f) {
        out[f] = y0[f];
        out[f].c = y0[f].c * E[f] +
                   (dt / 6.0) * (k1[f].c * E[f] + 2.0 * (k2[f].c + k3[f].c) * E2[f] +
                                 k4[f].c);
        if (!out[f].c.isFinite().all())
            throw NumericalError("NsSolver::step: non-finite values (divergence)");
    }
    scatter(state, std::move(out));
    state.t += dt;
}

void NsSolver::advance(NSState& state, double t_end, double dt_cap,
                       const std::function<void(const NSState&)>& on_step) const {
    while (state.t < t_end - 1e-14) {
        double dt = std::min(dt_cap, t_end - state.t);
        step(state, dt);
        if (on_step) on_step(state);
    }
}

PeriodicField2 NsSolver::velocity(const NSState& state) const {
    return ws_->velocity_fields(state.omega);
}

PeriodicField lamb_oseen_sum(int n, double L, const std::vector<Vec2>& centers,
                             const std::vector<double>& circulations, double nu,
                             double t) {
    PeriodicField ref(n, L);
    const double w2 = 4.0 * nu * (t + 1.0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double a = circulations[i] / (pi * w2);
        for (int jj = 0; jj < n; ++jj)
            for (int ii = 0; ii < n; ++ii) {
                double r2 = sq(ref.x(ii) - centers[i].x()) + sq(ref.y(jj) - centers[i].y());
                ref.values(ii, jj) += a * std::exp(-r2 / w2);
            }
    }
    return ref;
}

double l1_lamb_oseen_error_at(const NSState& state, const std::vector<Vec2>& centers) {
    if (centers.size() != state.config.positions.size())
        throw ConfigError("l1_lamb_oseen_error: center count mismatch");
    auto& ws = shared_workspace(state.n, state.L);
    PeriodicField w = ws.inverse(state.omega);
    PeriodicField ref = lamb_oseen_sum(state.n, state.L, centers,
                                       state.config.circulations, state.nu(), state.t);
    ref.values -= w.values;
    return ref.l1_norm();
}

double l1_lamb_oseen_error(const NSState& state, const TrajectorySet& traj) {
    if (traj.time_variable != TimeVariable::Physical)
        throw ConfigError("l1_lamb_oseen_error: trajectory must be in physical time");
    return l1_lamb_oseen_error_at(state, traj.interpolate(state.t));
}

Vec2 vortex_centroid(const NSState& state, int i) {
    auto& ws = shared_workspace(state.n, state.L);
    PeriodicField w = ws.inverse(state.omega_i.at(i));
    double m = 0.0;
    Vec2 c = Vec2::Zero();
    for (int jj = 0; jj < state.n; ++jj)
        for (int ii = 0; ii < state.n; ++ii) {
            double v = w.values(ii, jj);
            m += v;
            c += v * Vec2(w.x(ii), w.y(jj));
        }
    if (m == 0.0) throw NumericalError("vortex_centroid: zero mass");
    return c / m;
}

PointwiseErrorReport pointwise_velocity_error(const NSState& state,
                                              const std::vector<Vec2>& centers,
                                              double cutoff, double d_T) {
    auto& ws = shared_workspace(state.n, state.L);
    PeriodicField2 u = ws.velocity_fields(state.omega);
    PointwiseErrorReport rep;
    rep.error = PeriodicField(state.n, state.L);

    std::vector<double> errs, ds;
    for (int jj = 0; jj < state.n; ++jj)
        for (int ii = 0; ii < state.n; ++ii) {
            Vec2 x(rep.error.x(ii), rep.error.y(jj));
            double d = std::numeric_limits<double>::infinity();
            Vec2 upv = Vec2::Zero();
            for (std::size_t v = 0; v < centers.size(); ++v) {
                Vec2 dx = x - centers[v];
                d = std::min(d, dx.norm());
                if (dx.squaredNorm() > 0.0)
                    upv += state.config.circulations[v] * kb_eval(dx);
            }
            if (d < cutoff) continue;
            double e = (Vec2(u.x.values(ii, jj), u.y.values(ii, jj)) - upv).norm();
            rep.error.values(ii, jj) = e;
            rep.max_error = std::max(rep.max_error, e);
            errs.push_back(e);
            ds.push_back(d);
        }
    if (errs.empty()) {
        rep.empty = true;
        return rep;
    }

    // fit C0 by scanning, then C = max ratio against the bound shape
    const double kappa = state.params.kappa;
    const double t1 = state.t + 1.0;
    double best_C = std::numeric_limits<double>::infinity(), best_C0 = 1.0;
    for (double C0 = 0.25; C0 <= 64.0; C0 *= 1.5) {
        double C = 0.0;
        for (std::size_t k = 0; k < errs.size(); ++k) {
            double d = ds[k];
            double shape = std::min(1.0 / d, std::exp(-d_T * d_T / (C0 * kappa)) / (d * d)) +
                           std::exp(-d * d / (16.0 * kappa * t1)) / d + std::sqrt(kappa);
            C = std::max(C, errs[k] / shape);
        }
        if (C < best_C) {
            best_C = C;
            best_C0 = C0;
        }
    }
    rep.fitted_C = best_C;
    rep.fitted_C0 = best_C0;
    return rep;
}

double ring_velocity_error(const NSState& state, const std::vector<Vec2>& centers,
                           double ring_radius, int n_samples) {
    auto& ws = shared_workspace(state.n, state.L);
    SpectralField ux, uy;
    ws.velocity(state.omega, ux, uy);
    double worst = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (int k = 0; k < n_samples; ++k) {
            double th = 2.0 * pi * k / n_samples;
            Vec2 x = centers[i] + ring_radius * Vec2(std::cos(th), std::sin(th));
            Vec2 usol(ws.eval_at(ux, x.x(), x.y()), ws.eval_at(uy, x.x(), x.y()));
            Vec2 upv = Vec2::Zero();
            for (std::size_t v = 0; v < centers.size(); ++v)
                upv += state.config.circulations[v] * kb_eval(x - centers[v]);
            worst = std::max(worst, (usol - upv).norm());
        }
    }
    return worst;
}

} // namespace vlab
