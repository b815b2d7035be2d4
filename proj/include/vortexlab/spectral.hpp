#pragma once

#include "vortexlab/grid.hpp"

#include <complex>
#include <memory>

namespace vlab {

/// Spectral coefficients of a real n x n field (r2c layout: (n/2+1) x n).
struct SpectralField {
    int n = 0;
    double L = 0.0;
    CArrXX c;  // c(ki, kj), ki in [0, n/2], kj in [0, n)

    SpectralField() = default;
    SpectralField(int n_, double L_)
        : n(n_), L(L_), c(CArrXX::Zero(n_ / 2 + 1, n_)) {}
};

/// FFTW-backed transforms and spectral calculus on one grid size.
/// Plans are created once and reused; the class is not thread-safe per
/// instance but distinct instances may live on distinct threads.
class SpectralWorkspace {
public:
    SpectralWorkspace(int n, double L);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int n() const { return n_; }
    double L() const { return L_; }

    SpectralField forward(const PeriodicField& f) const;
    PeriodicField inverse(const SpectralField& s) const;

    /// Wavenumber along each axis for index m in [0, n): 2*pi/L * signed(m).
    double k_of(int m) const;

    SpectralField deriv_x(const SpectralField& s) const;
    SpectralField deriv_y(const SpectralField& s) const;
    SpectralField laplacian(const SpectralField& s) const;
    /// Inverse Laplacian with the zero mode set to zero.
    SpectralField poisson(const SpectralField& s) const;
    /// Zero all modes with |k| above the 2/3 rule cutoff.
    void dealias(SpectralField& s) const;

    /// u = grad^perp(Delta^{-1} omega); the k=0 mode of omega is dropped
    /// (mean removal). Divergence-free by construction.
    void velocity(const SpectralField& omega, SpectralField& ux, SpectralField& uy) const;

    PeriodicField2 velocity_fields(const SpectralField& omega) const;

    /// curl(u) = d(uy)/dx - d(ux)/dy.
    SpectralField curl(const SpectralField& ux, const SpectralField& uy) const;

    /// Evaluate a spectral field at an arbitrary point by direct Fourier
    /// summation (exact for the band-limited interpolant; O(n^2) per point).
    double eval_at(const SpectralField& s, double x, double y) const;

private:
    int n_;
    double L_;
    void* plan_fwd_;  // fftw_plan
    void* plan_bwd_;
    double* rbuf_;
    void* cbuf_;      // fftw_complex*
};

/// Thread-local workspace cache keyed by (n, L); plans are built once per
/// thread and size. The returned reference stays valid for the thread's life.
SpectralWorkspace& shared_workspace(int n, double L);

} // namespace vlab
