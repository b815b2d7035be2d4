#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace vlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using ArrX = Eigen::ArrayXd;
using ArrXX = Eigen::ArrayXXd;
using MatX = Eigen::MatrixXd;
using CArrXX = Eigen::ArrayXX<std::complex<double>>;

inline constexpr double pi = 3.14159265358979323846;

/// Invalid input data or configuration (exit code 1 territory).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A solver or quadrature failed to converge (exit code 2 territory).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two vortices closer than the collapse threshold, or coincident points
/// fed to a singular kernel.
struct DegenerateConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sq(double x) { return x * x; }

} // namespace vlab
