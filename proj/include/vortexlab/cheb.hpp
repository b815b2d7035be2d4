#pragma once

#include "vortexlab/common.hpp"

namespace vlab {

/// Chebyshev-Lobatto collocation on [a, b]: nodes ascending, dense
/// differentiation matrix, Clenshaw-Curtis quadrature weights, and stable
/// barycentric evaluation of the interpolant at arbitrary points.
struct ChebGrid {
    double a = 0.0, b = 1.0;
    ArrX x;       // n+1 nodes, ascending, x[0] = a, x[n] = b
    ArrX w;       // Clenshaw-Curtis weights on [a, b]
    ArrX bary;    // barycentric weights
    MatX D;       // first-derivative matrix

    ChebGrid() = default;
    ChebGrid(int n, double a, double b);

    int size() const { return static_cast<int>(x.size()); }

    /// Interpolant of nodal values f evaluated at point t.
    double eval(const ArrX& f, double t) const;
    /// Interpolation row vector at t (eval(f,t) == row.dot(f)).
    ArrX eval_row(double t) const;
    ArrX deriv(const ArrX& f) const { return (D * f.matrix()).array(); }
    double integrate(const ArrX& f) const { return (w * f).sum(); }
};

/// Gauss-Legendre rule with n points on [a, b].
struct GaussRule {
    ArrX x, w;
    GaussRule() = default;
    GaussRule(int n, double a, double b);
};

} // namespace vlab
