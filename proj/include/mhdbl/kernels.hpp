#pragma once

// Inner loops of the solver. Every kernel has a serial reference version
// and an OpenMP version over independent rows or columns; the pair is
// tested for agreement and compared in bench/.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mhdbl/exec.hpp"
#include "mhdbl/grid.hpp"

namespace mhdbl::kernels {

/// out = D_y^order in, row-major ny x nx. Reference walks one x-column at a
/// time; the parallel version sweeps whole rows.
void apply_y_stencil(const Grid& g, int order, const double* in, double* out, Exec exec);

/// Running y-integral per column, compensated.
void cumulative_y(const Grid& g, const double* in, double* out, Exec exec);

/// rfft of each row (unnormalized).
void rfft_rows(std::size_t nx, std::size_t ny, const double* in, std::complex<double>* out, Exec exec);

/// Inverse of rfft_rows including the 1/nx normalization.
void irfft_rows(std::size_t nx, std::size_t ny, const std::complex<double>* in, double* out, Exec exec);

/// Spectral x-derivative of every row with FFTs.
void ddx_fft(const Grid& g, const double* in, double* out, Exec exec);

/// Direct O(nx^2) trigonometric-interpolant derivative. Test oracle for ddx_fft.
void ddx_direct(const Grid& g, const double* in, double* out);

/// Banded matrix with partial pivoting LU, stored LAPACK-style with room
/// for kl extra super-diagonals of fill-in.
class BandedLU {
public:
    BandedLU(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t n() const { return n_; }
    /// Set A(i, j); |i - j| must lie within the band.
    void set(std::size_t i, std::size_t j, double value);
    double get(std::size_t i, std::size_t j) const;

    /// Throws SingularSystem on a zero pivot.
    void factor();
    bool factored() const { return factored_; }

    /// Solve in place for `ncols` right-hand sides laid out row-major
    /// (row i holds entry i of every column). Serial solves column by
    /// column; Parallel sweeps rows over column blocks.
    void solve(double* rhs, std::size_t ncols, Exec exec) const;

private:
    double& at(std::size_t i, std::size_t j) { return ab_[i * ld_ + (j + kl_ - i)]; }
    double at(std::size_t i, std::size_t j) const { return ab_[i * ld_ + (j + kl_ - i)]; }
    void solve_block(double* rhs, std::size_t ncols, std::size_t c0, std::size_t c1) const;
    void solve_column(double* x) const;

    std::size_t n_, kl_, ku_, ld_;
    std::vector<double> ab_;
    std::vector<std::size_t> piv_;
    bool factored_ = false;
};

}  // namespace mhdbl::kernels
