#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mhdbl/exec.hpp"
#include "mhdbl/field.hpp"

namespace mhdbl {

/// ⟨t⟩ = 1 + t.
inline double bracket(double t) { return 1.0 + t; }

/// theta_alpha(t, y) = exp(alpha z^2 / 4), z = y / sqrt(1 + t), alpha in [1/4, 1/2].
class GaussianWeight {
public:
    GaussianWeight(double alpha, double t);

    double alpha() const { return alpha_; }
    double t() const { return t_; }
    double z(double y) const;
    double operator()(double y) const;
    /// alpha z^2 / 4.
    double log_value(double y) const;
    /// theta(y) * f, falling back to log space when theta alone overflows.
    double times(double y, double f) const;
    /// Weight samples on the grid nodes.
    std::vector<double> sample(const Grid& g) const;

private:
    double alpha_;
    double t_;
};

/// Spectral x-derivative (Nyquist bin dropped).
Field ddx(const Field& f, Exec exec = Exec::Parallel);

/// Spectral m-th x-derivative (Nyquist bin dropped for m >= 1).
Field ddx_power(const Field& f, int m);

/// f(x - shift, y) by spectral phase rotation.
Field shift_x(const Field& f, double shift);

/// Fourth-order finite-difference y-derivative, order 1 or 2.
Field ddy(const Field& f, int order, Exec exec = Exec::Parallel);

/// Same stencils on a single y-profile.
std::vector<double> ddy_profile(const Grid& g, std::span<const double> f, int order);

/// F(y) = int_0^y f, fourth-order piecewise-cubic quadrature with
/// compensated running sums. F(x, 0) = 0.
Field cumint_y(const Field& f, Exec exec = Exec::Parallel);
std::vector<double> cumint_profile(const Grid& g, std::span<const double> f);

/// int_0^{y_max} f dy for one y-profile.
double integrate_profile(const Grid& g, std::span<const double> f);

/// || theta_alpha f ||_{L^2} over the truncated strip.
/// Throws NonFiniteWeightProduct if a product theta*f is not finite.
double weighted_l2(const Field& f, const GaussianWeight& w);

/// || theta_alpha f ||_{L^2_y} for a single y-profile.
double weighted_l2_profile(const Grid& g, std::span<const double> f, const GaussianWeight& w);

/// Row-wise real FFT: ny rows of nx/2 + 1 unnormalized coefficients.
struct RowSpectrum {
    std::size_t ny = 0;
    std::size_t nk = 0;
    std::vector<std::complex<double>> c;
    std::complex<double>& at(std::size_t i, std::size_t k) { return c[i * nk + k]; }
    const std::complex<double>& at(std::size_t i, std::size_t k) const { return c[i * nk + k]; }
};

RowSpectrum rfft_rows(const Field& f, Exec exec = Exec::Parallel);
Field irfft_rows(const RowSpectrum& s, const GridPtr& grid, Exec exec = Exec::Parallel);

}  // namespace mhdbl
