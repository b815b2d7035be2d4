#include "vortexlab/ode45.hpp"

#include "doctest.h"

#include <cmath>

using namespace vlab;

TEST_CASE("exponential decay matches closed form") {
    auto rhs = [](double, const VecX& y) { return VecX(-2.0 * y); };
    VecX y0(1);
    y0 << 1.0;
    VecX last(1);
    Ode45Options opt;
    opt.rel_tol = 1e-12;
    ode45(rhs, 0.0, 3.0, y0, opt, [&](double, const VecX& y) {
        last = y;
        return true;
    });
    CHECK(last[0] == doctest::Approx(std::exp(-6.0)).epsilon(1e-10));
}

TEST_CASE("circular orbit returns to start after one period") {
    auto rhs = [](double, const VecX& y) {
        VecX d(2);
        d << -y[1], y[0];
        return d;
    };
    VecX y0(2);
    y0 << 1.0, 0.0;
    VecX last(2);
    Ode45Options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    ode45(rhs, 0.0, 2.0 * pi, y0, opt, [&](double, const VecX& y) {
        last = y;
        return true;
    });
    CHECK(last[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(last[1]) < 1e-9);
}

TEST_CASE("observer can abort") {
    auto rhs = [](double, const VecX& y) { return VecX(y); };
    VecX y0(1);
    y0 << 1.0;
    auto res = ode45(rhs, 0.0, 10.0, y0, Ode45Options{},
                     [&](double t, const VecX&) { return t < 1.0; });
    CHECK_FALSE(res.completed);
}
