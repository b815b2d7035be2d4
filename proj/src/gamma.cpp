#include "vortexlab/gamma.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace vlab {

namespace {

struct StarRule {
    ArrX x, y, z, w, sqmu;  // v* nodes, weights, sqrt(mu(v*))
    ArrX cnod, cwgt;        // polar nodes on (0,1], mirrored for the lower half
    int n_phi = 12;
};

const StarRule& star_rule(const GammaRule& r) {
    thread_local std::map<std::tuple<int, double, int, int>, StarRule> cache;
    auto key = std::make_tuple(r.n_axis, r.Vq, r.n_c, r.n_phi);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    StarRule s;
    GaussRule g(r.n_axis, -r.Vq, r.Vq);
    long total = static_cast<long>(r.n_axis) * r.n_axis * r.n_axis;
    s.x.resize(total);
    s.y.resize(total);
    s.z.resize(total);
    s.w.resize(total);
    long idx = 0;
    for (int k = 0; k < r.n_axis; ++k)
        for (int j = 0; j < r.n_axis; ++j)
            for (int i = 0; i < r.n_axis; ++i, ++idx) {
                s.x[idx] = g.x[i];
                s.y[idx] = g.x[j];
                s.z[idx] = g.x[k];
                s.w[idx] = g.w[i] * g.w[j] * g.w[k];
            }
    s.sqmu = (std::pow(2.0 * pi, -0.75) *
              ((-0.25 * (s.x.square() + s.y.square() + s.z.square())).exp()));
    GaussRule gc(r.n_c, 0.0, 1.0);
    s.cnod = gc.x;
    s.cwgt = gc.w;
    s.n_phi = r.n_phi;
    return cache.emplace(key, std::move(s)).first->second;
}

} // namespace

double gamma_at(const Vec3& v0, const VFun& f, const VFun& g, const GammaRule& rule) {
    const StarRule& R = star_rule(rule);
    const double f0 = f(v0), g0 = g(v0);
    double acc = 0.0;
    for (long m = 0; m < R.x.size(); ++m) {
        Vec3 vs(R.x[m], R.y[m], R.z[m]);
        Vec3 w = v0 - vs;
        double wn = w.norm();
        double fs = f(vs), gs = g(vs);
        double loss = f0 * gs + g0 * fs;
        if (wn < 1e-13) continue;
        Vec3 what = w / wn;
        Vec3 a = (std::abs(what.x()) < 0.8) ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
        Vec3 e1 = what.cross(a).normalized();
        Vec3 e2 = what.cross(e1);

        double sph = 0.0;
        for (int half = 0; half < 2; ++half) {
            double sgn = half == 0 ? 1.0 : -1.0;
            for (int ic = 0; ic < R.cnod.size(); ++ic) {
                double c = sgn * R.cnod[ic];
                double st = std::sqrt(std::max(0.0, 1.0 - c * c));
                double wq = R.cwgt[ic];
                for (int ip = 0; ip < R.n_phi; ++ip) {
                    double phi = 2.0 * pi * (ip + 0.5) / R.n_phi;
                    Vec3 sdir = c * what + st * (std::cos(phi) * e1 + std::sin(phi) * e2);
                    double dot = wn * c;  // (v0 - v*) . s
                    Vec3 vp = v0 - dot * sdir;
                    Vec3 vsp = vs + dot * sdir;
                    double gain = f(vp) * g(vsp) + g(vp) * f(vsp);
                    sph += wq * (2.0 * pi / R.n_phi) * std::abs(dot) * (gain - loss);
                }
            }
        }
        acc += R.w[m] * R.sqmu[m] * sph;
    }
    return 0.5 * acc;
}

double lattice_eval(const DistFn& f, const Vec3& v) {
    const auto& g = *f.grid;
    const int n = g.n_axis;
    static thread_local VecX bw;
    if (bw.size() != n) {
        bw.resize(n);
        for (int j = 0; j < n; ++j) {
            double p = 1.0;
            for (int k = 0; k < n; ++k)
                if (k != j) p *= (g.axis[j] - g.axis[k]);
            bw[j] = 1.0 / p;
        }
        bw /= bw.cwiseAbs().maxCoeff();
    }
    auto row = [&](double t, VecX& r) {
        double den = 0.0;
        for (int j = 0; j < n; ++j) {
            double d = t - g.axis[j];
            if (std::abs(d) < 1e-14) {
                r.setZero();
                r[j] = 1.0;
                return;
            }
            r[j] = bw[j] / d;
            den += r[j];
        }
        r /= den;
    };
    if (std::abs(v.x()) > g.Vmax || std::abs(v.y()) > g.Vmax || std::abs(v.z()) > g.Vmax)
        return 0.0;
    VecX rx(n), ry(n), rz(n);
    row(v.x(), rx);
    row(v.y(), ry);
    row(v.z(), rz);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        if (rz[k] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            double wzy = rz[k] * ry[j];
            if (wzy == 0.0) continue;
            long base = (static_cast<long>(k) * n + j) * n;
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rx[i] * f.values[base + i];
            acc += wzy * s;
        }
    }
    return acc;
}

DistFn gamma_bilinear(const DistFn& f, const DistFn& g, const GammaRule& rule) {
    VFun fe = f.analytic ? f.analytic
                         : VFun([&f](const Vec3& v) { return lattice_eval(f, v); });
    VFun ge = g.analytic ? g.analytic
                         : VFun([&g](const Vec3& v) { return lattice_eval(g, v); });
    DistFn out(f.grid);
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < f.grid->size(); ++i)
        out.values[i] = gamma_at(f.grid->node(i), fe, ge, rule);
    return out;
}

GammaChannels gamma_channels_momentum_flux(const RadialCollision& radial,
                                           const ArrX& profile,
                                           const GammaRule& rule) {
    // Second argument H(v) = profile(r) vhat_1 vhat_2, first argument
    // e_2 = v_2 sqrt(mu). On the circle v = r (cos phi, sin phi, 0) the
    // output decomposes over the channels vhat_1 and vhat_1 vhat_2^2 - vhat_1/5.
    const ArrX& r = radial.r();
    GammaChannels ch;
    ch.q1 = ArrX::Zero(r.size());
    ch.q3 = ArrX::Zero(r.size());

    VFun e2 = [](const Vec3& v) { return v.y() * std::sqrt(maxwellian(v)); };
    VFun H = [&radial, &profile](const Vec3& v) {
        double rr = v.norm();
        if (rr < 1e-12) return 0.0;
        return radial.eval(profile, rr) * v.x() * v.y() / (rr * rr);
    };

    const int nphi = 16;
    auto b1 = [](double phi) { return std::cos(phi); };
    auto b2 = [](double phi) {
        double c = std::cos(phi), s = std::sin(phi);
        return c * s * s - c / 5.0;
    };
    double g11 = 0, g12 = 0, g22 = 0;
    for (int ip = 0; ip < nphi; ++ip) {
        double phi = 2.0 * pi * ip / nphi;
        g11 += b1(phi) * b1(phi);
        g12 += b1(phi) * b2(phi);
        g22 += b2(phi) * b2(phi);
    }

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < r.size(); ++i) {
        if (r[i] > 10.0) continue;  // Gaussian-class tail below roundoff
        double p1 = 0, p2 = 0;
        for (int ip = 0; ip < nphi; ++ip) {
            double phi = 2.0 * pi * ip / nphi;
            Vec3 v(r[i] * std::cos(phi), r[i] * std::sin(phi), 0.0);
            double G = gamma_at(v, e2, H, rule);
            p1 += G * b1(phi);
            p2 += G * b2(phi);
        }
        double det = g11 * g22 - g12 * g12;
        ch.q1[i] = (p1 * g22 - p2 * g12) / det;
        ch.q3[i] = (p2 * g11 - p1 * g12) / det;
    }
    return ch;
}

void BurnettArtifact::save(const std::string& path) const {
    nlohmann::json j;
    j["version"] = version;
    j["Vmax"] = Vmax;
    j["n_r"] = n_r;
    j["C1"] = C1;
    j["C2"] = C2;
    j["calib_res"] = calib_res;
    j["eta0"] = eta0;
    j["etac"] = etac;
    j["g1"] = g1;
    j["g2"] = g2;
    j["grid_tag"] = grid_tag;
    auto put = [&](const char* k, const ArrX& a) {
        j[k] = std::vector<double>(a.data(), a.data() + a.size());
    };
    put("r", r);
    put("alpha", alpha);
    put("beta", beta);
    put("t3", t3);
    put("h1A", h1A);
    put("h3A", h3A);
    put("h1B", h1B);
    put("h3B", h3B);
    put("hva1", hva1);
    put("hva3", hva3);
    std::ofstream out(path);
    if (!out) throw ConfigError("BurnettArtifact::save: cannot open " + path);
    out << j.dump(2) << '\n';
}

BurnettArtifact BurnettArtifact::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("BurnettArtifact::load: cannot open " + path);
    nlohmann::json j;
    in >> j;
    BurnettArtifact a;
    a.version = j.at("version");
    a.Vmax = j.at("Vmax");
    a.n_r = j.at("n_r");
    a.C1 = j.at("C1");
    a.C2 = j.at("C2");
    auto cr = j.at("calib_res").get<std::vector<double>>();
    std::copy(cr.begin(), cr.end(), a.calib_res.begin());
    a.eta0 = j.at("eta0");
    a.etac = j.at("etac");
    a.g1 = j.at("g1");
    a.g2 = j.at("g2");
    a.grid_tag = j.at("grid_tag");
    auto get = [&](const char* k) {
        auto v = j.at(k).get<std::vector<double>>();
        return Eigen::Map<ArrX>(v.data(), static_cast<long>(v.size())).eval();
    };
    a.r = get("r");
    a.alpha = get("alpha");
    a.beta = get("beta");
    a.t3 = get("t3");
    a.h1A = get("h1A");
    a.h3A = get("h3A");
    a.h1B = get("h1B");
    a.h3B = get("h3B");
    a.hva1 = get("hva1");
    a.hva3 = get("hva3");
    return a;
}

BurnettArtifact build_burnett_artifact(const RadialCollision& radial,
                                       const GammaRule& rule) {
    BurnettArtifact a;
    a.Vmax = radial.r()[radial.r().size() - 1];
    a.n_r = static_cast<int>(radial.r().size());
    a.C1 = radial.C1();
    a.C2 = radial.C2();
    a.calib_res = radial.calibration_residuals();
    a.r = radial.r();
    a.alpha = radial.alpha_profile();
    a.beta = radial.beta_profile();
    a.t3 = radial.t3_profile();
    a.eta0 = radial.eta0();
    a.etac = radial.etac();
    a.grid_tag = "chebgauss_nr" + std::to_string(a.n_r) + "_V" + std::to_string(a.Vmax);

    ArrX msr = radial.measure();
    ArrX rsm = radial.r() * radial.sqmu();

    auto deflate_momentum = [&](ArrX q) {
        ArrX nn = rsm / std::sqrt((msr * rsm.square()).sum());
        return ArrX(q - nn * (msr * nn * q).sum());
    };

    GammaChannels chA = gamma_channels_momentum_flux(
        radial, ArrX(radial.r().square() * radial.sqmu()), rule);
    GammaChannels chB = gamma_channels_momentum_flux(radial, a.alpha, rule);

    a.h1A = radial.solve_L(1, deflate_momentum(chA.q1));
    a.h3A = radial.solve_L(3, chA.q3);
    a.h1B = radial.solve_L(1, deflate_momentum(chB.q1));
    a.h3B = radial.solve_L(3, chB.q3);

    ArrX ralpha = radial.r() * a.alpha;
    a.hva1 = radial.solve_L(1, deflate_momentum(ArrX(ralpha / 5.0)));
    a.hva3 = radial.solve_L(3, ralpha);

    a.g1 = (4.0 * pi / 3.0) * (msr * a.beta * chA.q1).sum();
    a.g2 = (4.0 * pi / 3.0) * (msr * a.beta * chB.q1).sum();
    return a;
}

} // namespace vlab
