#include "vortexlab/collision.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace vlab;

namespace {

std::shared_ptr<const RadialCollision> radial() {
    static auto r = std::make_shared<RadialCollision>();
    return r;
}

VelocityGridPtr grid24() {
    static auto g = std::make_shared<VelocityGrid>(24, 8.0);
    return g;
}

const CollisionOp3D& op24() {
    static CollisionOp3D op(grid24(), radial());
    return op;
}

DistFn random_micro(unsigned seed) {
    // smooth random microscopic field: Gaussian times a random low-order
    // polynomial, projected off the invariants
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::array<double, 10> c;
    for (auto& x : c) x = g(rng);
    DistFn f(grid24(), [c](const Vec3& v) {
        double p = c[0] + c[1] * v.x() + c[2] * v.y() + c[3] * v.z() +
                   c[4] * v.x() * v.y() + c[5] * v.y() * v.z() + c[6] * v.x() * v.z() +
                   c[7] * v.x() * v.x() + c[8] * v.squaredNorm() +
                   c[9] * v.x() * v.squaredNorm();
        return p * std::sqrt(maxwellian(v));
    });
    return op24().project_out(f);
}

} // namespace

TEST_CASE("velocity grid: Maxwellian mass and second moment") {
    VelocityGrid g(32, 8.0);
    CHECK(std::abs(g.maxwellian_mass() - 1.0) < 1e-8);
    double m2 = (g.W * g.R2 * std::pow(2.0 * pi, -1.5) * (-0.5 * g.R2).exp()).sum();
    CHECK(std::abs(m2 - 3.0) < 1e-6);
    CHECK((g.W > 0.0).all());
}

TEST_CASE("maxwellian value at the origin") {
    CHECK(maxwellian(Vec3::Zero()) == doctest::Approx(std::pow(2.0 * pi, -1.5)));
}

TEST_CASE("nu: Monte Carlo oracle at v = 0, closed asymptote, linear envelopes") {
    // nu(0) = 2 pi E|v*|; independent Monte Carlo with fixed seed
    std::mt19937_64 rng(777);
    std::normal_distribution<double> n01(0.0, 1.0);
    double acc = 0.0;
    const int N = 1'000'000;
    for (int k = 0; k < N; ++k)
        acc += Vec3(n01(rng), n01(rng), n01(rng)).norm();
    double mc = 2.0 * pi * acc / N;
    CHECK(nu_eval(0.0) == doctest::Approx(mc).epsilon(5e-3));
    CHECK(nu_eval(0.0) == doctest::Approx(4.0 * std::sqrt(2.0 * pi)).epsilon(1e-10));

    // large-speed slope toward 2 pi
    CHECK(std::abs(nu_eval(8.0) / 8.0 - 2.0 * pi) < 0.15);
    CHECK(std::abs(nu_eval(12.0) / 12.0 - 2.0 * pi) < 0.07);
    double a8 = nu_eval(8.0) / 8.0 - 2.0 * pi;
    double a12 = nu_eval(12.0) / 12.0 - 2.0 * pi;
    CHECK(std::abs(a12) < std::abs(a8));

    // c1 (1+|v|) <= nu <= c2 (1+|v|) across the range
    double lo = 1e300, hi = 0.0;
    for (double r = 0.0; r <= 14.0; r += 0.25) {
        double ratio = nu_eval(r) / (1.0 + r);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 2.0);
}

TEST_CASE("kernel self-calibration: invariants annihilated, constants stable") {
    const auto& R = *radial();
    for (double res : R.calibration_residuals()) CHECK(res < 1e-6);
    // values frozen from an independent prototype of the same reduction
    CHECK(R.C1() == doctest::Approx(-1.0 / std::sqrt(2.0 * pi)).epsilon(2e-5));
    CHECK(R.C2() == doctest::Approx(4.0 / std::sqrt(2.0 * pi)).epsilon(2e-5));
}

TEST_CASE("transport coefficients: frozen oracle values and 4/3 structure") {
    const auto& R = *radial();
    // independent-prototype oracle values
    CHECK(R.eta0() == doctest::Approx(0.08956809).epsilon(1e-5));
    CHECK(R.etac() == doctest::Approx(0.33891641).epsilon(1e-5));

    auto rep = transport_coefficients(R);
    CHECK(std::abs(rep.ratio_1111_1212 - 4.0 / 3.0) < 0.01 * (4.0 / 3.0));
    CHECK(std::abs(rep.eta0_refined - rep.eta0) < 0.02 * rep.eta0);
    CHECK(std::abs(rep.etac_refined - rep.etac) < 0.02 * rep.etac);
}

TEST_CASE("radial solve plugs back") {
    const auto& R = *radial();
    double resid = 0.0;
    ArrX a = R.solve_L(2, ArrX(R.r().square() * R.sqmu()), &resid);
    CHECK(resid < 1e-9);
    // forcing scaled by lambda -> solution scaled by lambda
    ArrX a2 = R.solve_L(2, ArrX(3.0 * R.r().square() * R.sqmu()));
    CHECK((a2 - 3.0 * a).abs().maxCoeff() < 1e-9 * a.abs().maxCoeff());
}

TEST_CASE("projection algebra: P^2 = P, orthogonality, reference cases") {
    const auto& op = op24();
    DistFn f1(grid24(), [](const Vec3& v) { return v.x() * std::sqrt(maxwellian(v)); });
    Vec3 b;
    double a, c;
    DistFn p = op.project_P(f1, &a, &b, &c);
    CHECK((p.values - f1.values).abs().maxCoeff() < 1e-10);
    CHECK(std::abs(a) < 1e-10);
    CHECK(b.x() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(b.y()) < 1e-10);
    CHECK(std::abs(c) < 1e-10);

    DistFn f2(grid24(),
              [](const Vec3& v) { return v.x() * v.y() * std::sqrt(maxwellian(v)); });
    CHECK(op.project_P(f2).values.abs().maxCoeff() < 1e-10);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    DistFn f(grid24());
    for (long i = 0; i < f.values.size(); ++i)
        f.values[i] = g(rng) * std::exp(-0.2 * grid24()->R2[i]);
    DistFn pf = op.project_P(f);
    DistFn ppf = op.project_P(pf);
    CHECK((ppf.values - pf.values).abs().maxCoeff() < 1e-10);
    DistFn qf = op.project_out(f);
    CHECK(std::abs(pf.inner(qf)) < 1e-10 * f.norm() * f.norm());
}

TEST_CASE("lattice operator: invariants near kernel, exact symmetry") {
    const auto& op = op24();
    // lattice quadrature accuracy on the invariants (the radial calibration
    // is the tight check; this one bounds the desingularized 3D rule)
    // the lattice rule resolves the invariants to percent scale; the tight
    // annihilation check runs through the radial calibration
    for (const auto& phi : op.null_basis()) {
        DistFn Lphi = op.apply_L(phi);
        CHECK(Lphi.norm() < 0.25);
    }
    // symmetry to roundoff by construction
    DistFn f = random_micro(11), g = random_micro(12);
    CHECK(std::abs(op.apply_L(f).inner(g) - f.inner(op.apply_L(g))) <
          1e-10 * f.norm() * g.norm());
}

TEST_CASE("coercivity over random microscopic fields") {
    const auto& op = op24();
    double c0 = 1e300;
    for (unsigned seed = 0; seed < 20; ++seed) {
        DistFn f = random_micro(100 + seed);
        DistFn Lf = op.apply_L(f);
        double num = Lf.inner(f);
        ArrX nus = f.grid->R2;
        double den = 0.0;
        for (long i = 0; i < f.values.size(); ++i)
            den += f.grid->W[i] * nu_eval(std::sqrt(nus[i])) * sq(f.values[i]);
        CHECK(num > 0.0);
        c0 = std::min(c0, num / den);
    }
    CHECK(c0 > 0.0);
    MESSAGE("fitted coercivity constant c0 = ", c0);
}

TEST_CASE("five near-zero eigenvalues on a probing subspace") {
    const auto& op = op24();
    std::vector<DistFn> basis = op.null_basis();
    for (unsigned s = 0; s < 10; ++s) basis.push_back(random_micro(200 + s));
    // orthonormalize
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double c = basis[i].inner(basis[j]);
            basis[i].values -= c * basis[j].values;
        }
        basis[i].values /= basis[i].norm();
    }
    const int m = static_cast<int>(basis.size());
    MatX G(m, m);
    std::vector<DistFn> Lb;
    for (auto& b : basis) Lb.push_back(op.apply_L(b));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = basis[i].inner(Lb[j]);
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (G + G.transpose()));
    int near_zero = 0;
    for (int i = 0; i < m; ++i)
        if (std::abs(es.eigenvalues()[i]) < 0.1) ++near_zero;
    CHECK(near_zero == 5);
    // semidefinite up to the lattice quadrature floor (~1% of the spectrum)
    double lam_max = es.eigenvalues()[m - 1];
    CHECK(es.eigenvalues()[0] > -0.02 * lam_max);
}

TEST_CASE("CG inverse: left inverse, structure of A_12, null input") {
    const auto& op = op24();
    // smooth microscopic input: the inverse is resolved to the lattice
    // quadrature floor
    DistFn g(grid24(), [](const Vec3& v) {
        return (v.x() * v.y() + 0.3 * v.x() * (v.squaredNorm() - 5.0)) *
               std::sqrt(maxwellian(v));
    });
    g = op.project_out(g);
    DistFn h = op.apply_L(g);
    auto res = op.solve_Linv(h, 1e-10, 300);
    CHECK((res.x.values - g.values).abs().maxCoeff() < 1e-4 * g.values.abs().maxCoeff());

    // A_12 = alpha(|v|) vhat1 vhat2 structure: off-structure energy <= 1%
    DistFn Ahat12(grid24(),
                  [](const Vec3& v) { return v.x() * v.y() * std::sqrt(maxwellian(v)); });
    auto cg = op.solve_Linv(Ahat12, 1e-9, 300);
    DistFn proj(grid24(), [&](const Vec3& v) {
        double r = v.norm();
        if (r < 1e-12) return 0.0;
        return radial()->eval(radial()->alpha_profile(), r) * v.x() * v.y() / (r * r);
    });
    double c = cg.x.inner(proj) / proj.inner(proj);
    DistFn offs = cg.x;
    offs.values -= c * proj.values;
    CHECK(sq(offs.norm()) < 0.01 * sq(cg.x.norm()));

    // member of the null space: projection kills the input
    auto zero = op.solve_Linv(op.null_basis()[2], 1e-9, 50);
    CHECK(zero.x.norm() < 1e-12);
    CHECK(zero.projection_residual > 0.99);

    // solve_Linv . apply_L = (I - P) on a smooth input
    DistFn f(grid24(), [](const Vec3& v) {
        return (0.4 * v.y() * v.z() - v.x() * v.x() + 0.1 * v.squaredNorm()) *
               std::sqrt(maxwellian(v));
    });
    auto inv = op.solve_Linv(op.apply_L(f), 1e-10, 300);
    DistFn ip = op.project_out(f);
    CHECK((inv.x.values - ip.values).abs().maxCoeff() <
          1e-4 * ip.values.abs().maxCoeff());
}

TEST_CASE("weighted kernel bound: finite, stable, monotone in rho0") {
    auto rep = kernel_bound_check(*radial(), 1.0 / 32.0, 0.0);
    CHECK_FALSE(rep.diverged);
    CHECK(rep.stability < 0.02);
    auto rep0 = kernel_bound_check(*radial(), 0.0, 0.0);
    CHECK(rep0.refined_supremum <= rep.refined_supremum * (1.0 + 1e-9));
    CHECK(std::isfinite(rep.grad_constants[0]));
    CHECK(std::isfinite(rep.grad_constants[1]));
    CHECK(rep.grad_constants[0] > 0.0);
}

TEST_CASE("3D cross-check of eta0 against the radial route") {
    double gap = 0.0;
    auto rep = transport_coefficients(*radial(), &op24(), &gap);
    CHECK(gap < 0.02);
    CHECK(rep.offdiag_bb < 1e-3);
}
