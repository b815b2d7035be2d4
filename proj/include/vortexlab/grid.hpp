#pragma once

#include "vortexlab/common.hpp"

#include <string>

namespace vlab {

/// Scalar field sampled on an n x n periodic box [0, L)^2.
/// values(i, j) is the sample at x = i*L/n, y = j*L/n.
struct PeriodicField {
    int n = 0;
    double L = 0.0;
    ArrXX values;

    PeriodicField() = default;
    PeriodicField(int n_, double L_) : n(n_), L(L_), values(ArrXX::Zero(n_, n_)) {
        if (n_ <= 0 || (n_ & (n_ - 1)) != 0)
            throw ConfigError("PeriodicField: grid size must be a power of two");
        if (L_ <= 0.0) throw ConfigError("PeriodicField: box side must be > 0");
    }

    double h() const { return L / n; }
    double x(int i) const { return i * h(); }
    double y(int j) const { return j * h(); }
    double cell_area() const { return sq(h()); }

    double integral() const { return values.sum() * cell_area(); }
    double l1_norm() const { return values.abs().sum() * cell_area(); }
    double l2_norm() const { return std::sqrt((values * values).sum() * cell_area()); }
    double lp_norm(double p) const {
        return std::pow((values.abs().pow(p)).sum() * cell_area(), 1.0 / p);
    }
    double max_abs() const { return values.abs().maxCoeff(); }

    void check_compatible(const PeriodicField& o, const char* where) const {
        if (n != o.n || L != o.L) throw ConfigError(std::string(where) + ": grid mismatch");
    }
};

/// Two-component field on the same grid (velocities).
struct PeriodicField2 {
    PeriodicField x, y;
    PeriodicField2() = default;
    PeriodicField2(int n, double L) : x(n, L), y(n, L) {}
    double max_norm() const { return std::sqrt((x.values * x.values + y.values * y.values).maxCoeff()); }
};

/// Binary grid snapshot: little-endian header (magic, dims, box) + doubles.
void write_grid_binary(const PeriodicField& f, const std::string& path);
PeriodicField read_grid_binary(const std::string& path);
void write_grid_csv(const PeriodicField& f, const std::string& path);

} // namespace vlab
