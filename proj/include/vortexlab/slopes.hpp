#pragma once

#include "vortexlab/common.hpp"

#include <vector>

namespace vlab {

enum class FitMode { LogLog, SemiLogX, Linear };

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_points = 0;
};

/// Ordinary least squares in transformed coordinates.
/// LogLog: log(y) vs log(x); SemiLogX: log(y) vs x; Linear: y vs x.
/// Log modes require >= 4 strictly positive values and throw ConfigError
/// otherwise.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                   FitMode mode);

} // namespace vlab
