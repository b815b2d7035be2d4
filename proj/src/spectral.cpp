#include "vortexlab/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace vlab {

namespace {
std::mutex plan_mutex;  // FFTW planning is not thread-safe
}

SpectralWorkspace::SpectralWorkspace(int n, double L) : n_(n), L_(L) {
    PeriodicField probe(n, L);  // validates n power of two, L > 0
    std::lock_guard<std::mutex> lock(plan_mutex);
    rbuf_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    cbuf_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1) * n);
    // Eigen arrays are column-major with the x index fastest; FFTW r2c is
    // row-major, so declare dims (n0, n1) = (y, x). Half-complex axis = x.
    plan_fwd_ = fftw_plan_dft_r2c_2d(n, n, rbuf_, static_cast<fftw_complex*>(cbuf_),
                                     FFTW_MEASURE);
    plan_bwd_ = fftw_plan_dft_c2r_2d(n, n, static_cast<fftw_complex*>(cbuf_), rbuf_,
                                     FFTW_MEASURE);
    if (!plan_fwd_ || !plan_bwd_) throw NumericalError("FFTW planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(rbuf_);
    fftw_free(cbuf_);
}

SpectralField SpectralWorkspace::forward(const PeriodicField& f) const {
    if (f.n != n_ || f.L != L_) throw ConfigError("forward: grid mismatch");
    std::memcpy(rbuf_, f.values.data(), sizeof(double) * n_ * n_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), rbuf_,
                         static_cast<fftw_complex*>(cbuf_));
    SpectralField s(n_, L_);
    std::memcpy(s.c.data(), cbuf_, sizeof(fftw_complex) * (n_ / 2 + 1) * n_);
    s.c /= static_cast<double>(n_) * n_;
    return s;
}

PeriodicField SpectralWorkspace::inverse(const SpectralField& s) const {
    if (s.n != n_ || s.L != L_) throw ConfigError("inverse: grid mismatch");
    std::memcpy(cbuf_, s.c.data(), sizeof(fftw_complex) * (n_ / 2 + 1) * n_);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                         static_cast<fftw_complex*>(cbuf_), rbuf_);
    PeriodicField f(n_, L_);
    std::memcpy(f.values.data(), rbuf_, sizeof(double) * n_ * n_);
    return f;
}

double SpectralWorkspace::k_of(int m) const {
    int mm = (m <= n_ / 2) ? m : m - n_;
    return 2.0 * pi / L_ * mm;
}

SpectralField SpectralWorkspace::deriv_x(const SpectralField& s) const {
    SpectralField d(n_, L_);
    for (int kj = 0; kj < n_; ++kj)
        for (int ki = 0; ki <= n_ / 2; ++ki)
            d.c(ki, kj) = std::complex<double>(0.0, k_of(ki)) * s.c(ki, kj);
    return d;
}

SpectralField SpectralWorkspace::deriv_y(const SpectralField& s) const {
    SpectralField d(n_, L_);
    for (int kj = 0; kj < n_; ++kj) {
        std::complex<double> iky(0.0, k_of(kj));
        for (int ki = 0; ki <= n_ / 2; ++ki) d.c(ki, kj) = iky * s.c(ki, kj);
    }
    return d;
}

SpectralField SpectralWorkspace::laplacian(const SpectralField& s) const {
    SpectralField d(n_, L_);
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        for (int ki = 0; ki <= n_ / 2; ++ki) {
            double kx = k_of(ki);
            d.c(ki, kj) = -(kx * kx + ky * ky) * s.c(ki, kj);
        }
    }
    return d;
}

SpectralField SpectralWorkspace::poisson(const SpectralField& s) const {
    SpectralField d(n_, L_);
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        for (int ki = 0; ki <= n_ / 2; ++ki) {
            double kx = k_of(ki);
            double k2 = kx * kx + ky * ky;
            d.c(ki, kj) = (k2 == 0.0) ? 0.0 : -s.c(ki, kj) / k2;
        }
    }
    return d;
}

void SpectralWorkspace::dealias(SpectralField& s) const {
    const double kcut = (2.0 / 3.0) * (pi * n_ / L_);
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        for (int ki = 0; ki <= n_ / 2; ++ki) {
            double kx = k_of(ki);
            if (std::abs(kx) > kcut || std::abs(ky) > kcut) s.c(ki, kj) = 0.0;
        }
    }
}

void SpectralWorkspace::velocity(const SpectralField& omega, SpectralField& ux,
                                 SpectralField& uy) const {
    ux = SpectralField(n_, L_);
    uy = SpectralField(n_, L_);
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        for (int ki = 0; ki <= n_ / 2; ++ki) {
            double kx = k_of(ki);
            double k2 = kx * kx + ky * ky;
            if (k2 == 0.0) continue;  // mean removal
            // psi_hat = -omega_hat / k^2, u = (-d_y psi, d_x psi)
            std::complex<double> psi = -omega.c(ki, kj) / k2;
            ux.c(ki, kj) = std::complex<double>(0.0, -ky) * psi;
            uy.c(ki, kj) = std::complex<double>(0.0, kx) * psi;
        }
    }
}

PeriodicField2 SpectralWorkspace::velocity_fields(const SpectralField& omega) const {
    SpectralField ux, uy;
    velocity(omega, ux, uy);
    PeriodicField2 u(n_, L_);
    u.x = inverse(ux);
    u.y = inverse(uy);
    return u;
}

SpectralField SpectralWorkspace::curl(const SpectralField& ux,
                                      const SpectralField& uy) const {
    SpectralField d(n_, L_);
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        for (int ki = 0; ki <= n_ / 2; ++ki) {
            double kx = k_of(ki);
            d.c(ki, kj) = std::complex<double>(0.0, kx) * uy.c(ki, kj) -
                          std::complex<double>(0.0, ky) * ux.c(ki, kj);
        }
    }
    return d;
}

SpectralWorkspace& shared_workspace(int n, double L) {
    thread_local std::map<std::pair<int, double>, std::unique_ptr<SpectralWorkspace>> cache;
    auto key = std::make_pair(n, L);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<SpectralWorkspace>(n, L)).first;
    return *it->second;
}

double SpectralWorkspace::eval_at(const SpectralField& s, double x, double y) const {
    std::complex<double> acc = 0.0;
    for (int kj = 0; kj < n_; ++kj) {
        double ky = k_of(kj);
        // ki = 0 and ki = n/2 rows are their own conjugate counterparts
        acc += s.c(0, kj) * std::exp(std::complex<double>(0.0, ky * y));
        for (int ki = 1; ki < n_ / 2; ++ki) {
            double kx = k_of(ki);
            std::complex<double> ph =
                std::exp(std::complex<double>(0.0, kx * x + ky * y));
            acc += s.c(ki, kj) * ph + std::conj(s.c(ki, kj) * ph);
        }
        double kx = pi * n_ / L_;
        acc += s.c(n_ / 2, kj) * std::exp(std::complex<double>(0.0, kx * x + ky * y));
    }
    return acc.real();
}

} // namespace vlab
