#include "vortexlab/cheb.hpp"

#include <cmath>

namespace vlab {

ChebGrid::ChebGrid(int n, double a_, double b_) : a(a_), b(b_) {
    if (n < 2) throw ConfigError("ChebGrid: need n >= 2");
    const int m = n + 1;
    x.resize(m);
    bary.resize(m);
    // standard nodes cos(k pi / n) mapped to [a,b], reordered ascending
    for (int k = 0; k <= n; ++k) {
        double c = std::cos(pi * (n - k) / n);
        x[k] = 0.5 * (a + b) + 0.5 * (b - a) * c;
        bary[k] = ((n - k) % 2 == 0 ? 1.0 : -1.0);
    }
    bary[0] *= 0.5;
    bary[m - 1] *= 0.5;

    // Clenshaw-Curtis weights (exact cosine sums)
    w.resize(m);
    for (int k = 0; k <= n; ++k) {
        double theta = pi * k / n;
        double s = 1.0;
        for (int j = 1; j <= n / 2; ++j) {
            double bj = (2 * j == n) ? 1.0 : 2.0;
            s -= bj * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
        }
        double ck = (k == 0 || k == n) ? 1.0 : 2.0;
        w[n - k] = ck * s / n;
    }
    w *= 0.5 * (b - a);

    // differentiation matrix in barycentric form
    D.resize(m, m);
    for (int i = 0; i < m; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            double d = (bary[j] / bary[i]) / (x[i] - x[j]);
            D(i, j) = d;
            rowsum += d;
        }
        D(i, i) = -rowsum;
    }
}

ArrX ChebGrid::eval_row(double t) const {
    const int m = size();
    ArrX row = ArrX::Zero(m);
    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
        double d = t - x[j];
        if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(b - a))) {
            row.setZero();
            row[j] = 1.0;
            return row;
        }
        row[j] = bary[j] / d;
        denom += row[j];
    }
    row /= denom;
    return row;
}

double ChebGrid::eval(const ArrX& f, double t) const {
    return (eval_row(t) * f).sum();
}

GaussRule::GaussRule(int n, double a, double b) {
    if (n < 1) throw ConfigError("GaussRule: need n >= 1");
    // Golub-Welsch via symmetric tridiagonal eigenvalue problem
    MatX J = MatX::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        double bi = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = bi;
        J(i - 1, i) = bi;
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(J);
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi = es.eigenvalues()[i];
        double w0 = 2.0 * sq(es.eigenvectors()(0, i));
        x[i] = 0.5 * (a + b) + 0.5 * (b - a) * xi;
        w[i] = 0.5 * (b - a) * w0;
    }
}

} // namespace vlab
