#include "mhdbl/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mhdbl/errors.hpp"
#include "mhdbl/kernels.hpp"
#include "mhdbl/summation.hpp"

namespace mhdbl {

GaussianWeight::GaussianWeight(double alpha, double t) : alpha_(alpha), t_(t) {
    if (!(alpha >= 0.25 && alpha <= 0.5)) {
        throw std::invalid_argument("GaussianWeight: alpha must lie in [1/4, 1/2], got " + std::to_string(alpha));
    }
    if (!(t >= 0.0)) throw std::invalid_argument("GaussianWeight: t must be >= 0");
}

double GaussianWeight::z(double y) const { return y / std::sqrt(bracket(t_)); }

double GaussianWeight::operator()(double y) const {
    const double zz = z(y);
    return std::exp(alpha_ * zz * zz / 4.0);
}

double GaussianWeight::log_value(double y) const {
    const double zz = z(y);
    return alpha_ * zz * zz / 4.0;
}

double GaussianWeight::times(double y, double f) const {
    if (f == 0.0) return 0.0;
    const double th = (*this)(y);
    if (std::isfinite(th)) return th * f;
    // theta overflowed; the product may still be representable
    return std::copysign(std::exp(log_value(y) + std::log(std::abs(f))), f);
}

std::vector<double> GaussianWeight::sample(const Grid& g) const {
    std::vector<double> w(g.ny());
    for (std::size_t i = 0; i < g.ny(); ++i) w[i] = (*this)(g.y(i));
    return w;
}

Field ddx(const Field& f, Exec exec) {
    Field out(f.grid_ptr());
    kernels::ddx_fft(f.grid(), f.data(), out.data(), exec);
    return out;
}

RowSpectrum rfft_rows(const Field& f, Exec exec) {
    RowSpectrum s;
    s.ny = f.ny();
    s.nk = f.nx() / 2 + 1;
    s.c.resize(s.ny * s.nk);
    kernels::rfft_rows(f.nx(), f.ny(), f.data(), s.c.data(), exec);
    return s;
}

Field irfft_rows(const RowSpectrum& s, const GridPtr& grid, Exec exec) {
    Field out(grid);
    kernels::irfft_rows(grid->nx(), grid->ny(), s.c.data(), out.data(), exec);
    return out;
}

Field ddx_power(const Field& f, int m) {
    if (m < 0) throw std::invalid_argument("ddx_power: m must be >= 0");
    if (m == 0) return f;
    const Grid& g = f.grid();
    RowSpectrum s = rfft_rows(f);
    std::vector<std::complex<double>> factor(s.nk);
    for (std::size_t k = 0; k < s.nk; ++k) {
        if (k == g.nyquist()) {
            factor[k] = 0.0;
        } else {
            factor[k] = std::pow(std::complex<double>(0.0, g.wavenumber(k)), m);
        }
    }
    for (std::size_t i = 0; i < s.ny; ++i) {
        for (std::size_t k = 0; k < s.nk; ++k) s.at(i, k) *= factor[k];
    }
    return irfft_rows(s, f.grid_ptr());
}

Field shift_x(const Field& f, double shift) {
    const Grid& g = f.grid();
    RowSpectrum s = rfft_rows(f);
    std::vector<std::complex<double>> factor(s.nk);
    for (std::size_t k = 0; k < s.nk; ++k) {
        const double phase = -g.wavenumber(k) * shift;
        factor[k] = k == g.nyquist() ? std::complex<double>(std::cos(phase), 0.0) : std::polar(1.0, phase);
    }
    for (std::size_t i = 0; i < s.ny; ++i) {
        for (std::size_t k = 0; k < s.nk; ++k) s.at(i, k) *= factor[k];
    }
    return irfft_rows(s, f.grid_ptr());
}

Field ddy(const Field& f, int order, Exec exec) {
    Field out(f.grid_ptr());
    kernels::apply_y_stencil(f.grid(), order, f.data(), out.data(), exec);
    return out;
}

std::vector<double> ddy_profile(const Grid& g, std::span<const double> f, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("ddy_profile: order must be 1 or 2");
    if (f.size() != g.ny()) throw std::invalid_argument("ddy_profile: length mismatch");
    std::vector<double> out(g.ny());
    for (std::size_t i = 0; i < g.ny(); ++i) {
        const Stencil& s = order == 1 ? g.d1(i) : g.d2(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < s.size; ++k) acc += s.w[k] * f[s.first + k];
        out[i] = acc;
    }
    return out;
}

Field cumint_y(const Field& f, Exec exec) {
    Field out(f.grid_ptr());
    kernels::cumulative_y(f.grid(), f.data(), out.data(), exec);
    return out;
}

std::vector<double> cumint_profile(const Grid& g, std::span<const double> f) {
    if (f.size() != g.ny()) throw std::invalid_argument("cumint_profile: length mismatch");
    std::vector<double> out(g.ny(), 0.0);
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < g.ny(); ++i) {
        const auto& w = g.interval_weights(i);
        const std::size_t s = g.interval_first(i);
        acc.add(w[0] * f[s] + w[1] * f[s + 1] + w[2] * f[s + 2] + w[3] * f[s + 3]);
        out[i + 1] = acc.value();
    }
    return out;
}

double integrate_profile(const Grid& g, std::span<const double> f) {
    if (f.size() != g.ny()) throw std::invalid_argument("integrate_profile: length mismatch");
    const auto q = g.node_weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(q[i] * f[i]);
    return acc.value();
}

double weighted_l2_profile(const Grid& g, std::span<const double> f, const GaussianWeight& w) {
    if (f.size() != g.ny()) throw std::invalid_argument("weighted_l2_profile: length mismatch");
    const auto q = g.node_weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = w.times(g.y(i), f[i]);
        if (!std::isfinite(p)) {
            throw NonFiniteWeightProduct("theta*f is not finite at y = " + std::to_string(g.y(i)));
        }
        acc.add(q[i] * p * p);
    }
    return std::sqrt(std::max(0.0, acc.value()));
}

double weighted_l2(const Field& f, const GaussianWeight& w) {
    const Grid& g = f.grid();
    const auto q = g.node_weights();
    CompensatedSum total;
    for (std::size_t i = 0; i < g.ny(); ++i) {
        const double y = g.y(i);
        const double th = w(y);
        CompensatedSum row;
        for (double x : f.row(i)) {
            const double p = std::isfinite(th) ? th * x : w.times(y, x);
            if (!std::isfinite(p)) {
                throw NonFiniteWeightProduct("theta*f is not finite at y = " + std::to_string(g.y(i)));
            }
            row.add(p * p);
        }
        total.add(q[i] * row.value());
    }
    return std::sqrt(std::max(0.0, total.value() * g.dx()));
}

}  // namespace mhdbl
