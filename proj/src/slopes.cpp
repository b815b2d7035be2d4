#include "vortexlab/slopes.hpp"

#include <cmath>

namespace vlab {

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                   FitMode mode) {
    if (xs.size() != ys.size())
        throw ConfigError("fit_slope: mismatched input lengths");
    std::size_t need = (mode == FitMode::Linear) ? 2 : 4;
    if (xs.size() < need)
        throw ConfigError("fit_slope: insufficient points (need >= " +
                          std::to_string(need) + ")");

    std::vector<double> u(xs.size()), v(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i], y = ys[i];
        if (mode == FitMode::LogLog) {
            if (x <= 0.0 || y <= 0.0)
                throw ConfigError("fit_slope: nonpositive value in log-log mode");
            u[i] = std::log(x);
            v[i] = std::log(y);
        } else if (mode == FitMode::SemiLogX) {
            if (y <= 0.0)
                throw ConfigError("fit_slope: nonpositive value in semilog mode");
            u[i] = x;
            v[i] = std::log(y);
        } else {
            u[i] = x;
            v[i] = y;
        }
        if (!std::isfinite(u[i]) || !std::isfinite(v[i]))
            throw ConfigError("fit_slope: non-finite data");
    }

    double n = static_cast<double>(u.size());
    double su = 0, sv = 0, suu = 0, suv = 0, svv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
        suu += u[i] * u[i];
        suv += u[i] * v[i];
        svv += v[i] * v[i];
    }
    double den = n * suu - su * su;
    if (den == 0.0) throw ConfigError("fit_slope: degenerate abscissae");

    SlopeFit fit;
    fit.n_points = static_cast<int>(u.size());
    fit.slope = (n * suv - su * sv) / den;
    fit.intercept = (sv - fit.slope * su) / n;
    double ss_tot = svv - sv * sv / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        ss_res += sq(v[i] - fit.slope * u[i] - fit.intercept);
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace vlab
