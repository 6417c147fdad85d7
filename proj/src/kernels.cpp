#include "mhdbl/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mhdbl/errors.hpp"

namespace mhdbl::kernels {

namespace {

// Per-thread column block used by the row-sweeping kernels.
constexpr std::size_t kColumnBlock = 64;

std::ptrdiff_t as_signed(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution through the new-array API is.
// Plans are built once per length with FFTW_UNALIGNED so that any buffer can
// be used and the chosen codelets (hence the bits) never depend on alignment.
const FftPlans& plans_for(std::size_t nx) {
    static std::mutex mutex;
    static std::map<std::size_t, FftPlans> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(nx);
    if (it != cache.end()) return it->second;
    const int n = static_cast<int>(nx);
    double* in = fftw_alloc_real(nx);
    fftw_complex* out = fftw_alloc_complex(nx / 2 + 1);
    FftPlans p;
    p.forward = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (!p.forward || !p.backward) throw std::runtime_error("FFTW planning failed for nx = " + std::to_string(nx));
    return cache.emplace(nx, p).first->second;
}

void forward_row(const FftPlans& p, const double* in, std::complex<double>* out) {
    // r2c leaves its input untouched.
    fftw_execute_dft_r2c(p.forward, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void backward_row(const FftPlans& p, std::size_t nx, std::complex<double>* scratch, double* out) {
    fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(scratch), out);
    const double inv = 1.0 / static_cast<double>(nx);
    for (std::size_t j = 0; j < nx; ++j) out[j] *= inv;
}

void ddx_row(const Grid& g, const FftPlans& p, const double* in, double* out,
             std::vector<std::complex<double>>& buf) {
    const std::size_t nx = g.nx();
    const std::size_t nk = nx / 2 + 1;
    forward_row(p, in, buf.data());
    for (std::size_t k = 0; k < nk; ++k) {
        if (k == g.nyquist()) {
            buf[k] = 0.0;
        } else {
            buf[k] *= std::complex<double>(0.0, g.wavenumber(k));
        }
    }
    backward_row(p, nx, buf.data(), out);
}

}  // namespace

void apply_y_stencil(const Grid& g, int order, const double* in, double* out, Exec exec) {
    if (order != 1 && order != 2) throw std::invalid_argument("apply_y_stencil: order must be 1 or 2");
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    if (exec == Exec::Serial) {
        for (std::size_t j = 0; j < nx; ++j) {
            for (std::size_t i = 0; i < ny; ++i) {
                const Stencil& s = order == 1 ? g.d1(i) : g.d2(i);
                double acc = 0.0;
                for (std::size_t k = 0; k < s.size; ++k) acc += s.w[k] * in[(s.first + k) * nx + j];
                out[i * nx + j] = acc;
            }
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < as_signed(ny); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Stencil& s = order == 1 ? g.d1(i) : g.d2(i);
        double* o = out + i * nx;
        std::fill(o, o + nx, 0.0);
        for (std::size_t k = 0; k < s.size; ++k) {
            const double w = s.w[k];
            const double* src = in + (s.first + k) * nx;
            for (std::size_t j = 0; j < nx; ++j) o[j] += w * src[j];
        }
    }
}

void cumulative_y(const Grid& g, const double* in, double* out, Exec exec) {
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    auto column = [&](std::size_t c0, std::size_t c1) {
        const std::size_t width = c1 - c0;
        std::vector<double> sum(width, 0.0);
        std::vector<double> comp(width, 0.0);
        for (std::size_t j = 0; j < width; ++j) out[c0 + j] = 0.0;
        for (std::size_t i = 0; i + 1 < ny; ++i) {
            const auto& w = g.interval_weights(i);
            const std::size_t f = g.interval_first(i);
            for (std::size_t j = 0; j < width; ++j) {
                const std::size_t col = c0 + j;
                const double x = w[0] * in[f * nx + col] + w[1] * in[(f + 1) * nx + col] +
                                 w[2] * in[(f + 2) * nx + col] + w[3] * in[(f + 3) * nx + col];
                const double t = sum[j] + x;
                if (std::abs(sum[j]) >= std::abs(x)) {
                    comp[j] += (sum[j] - t) + x;
                } else {
                    comp[j] += (x - t) + sum[j];
                }
                sum[j] = t;
                out[(i + 1) * nx + col] = sum[j] + comp[j];
            }
        }
    };
    if (exec == Exec::Serial) {
        for (std::size_t j = 0; j < nx; ++j) column(j, j + 1);
        return;
    }
    const std::size_t blocks = (nx + kColumnBlock - 1) / kColumnBlock;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < as_signed(blocks); ++b) {
        const std::size_t c0 = static_cast<std::size_t>(b) * kColumnBlock;
        column(c0, std::min(nx, c0 + kColumnBlock));
    }
}

void rfft_rows(std::size_t nx, std::size_t ny, const double* in, std::complex<double>* out, Exec exec) {
    const FftPlans& p = plans_for(nx);
    const std::size_t nk = nx / 2 + 1;
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < ny; ++i) forward_row(p, in + i * nx, out + i * nk);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < as_signed(ny); ++i) {
        const auto r = static_cast<std::size_t>(i);
        forward_row(p, in + r * nx, out + r * nk);
    }
}

void irfft_rows(std::size_t nx, std::size_t ny, const std::complex<double>* in, double* out, Exec exec) {
    const FftPlans& p = plans_for(nx);
    const std::size_t nk = nx / 2 + 1;
    auto one = [&](std::size_t r, std::vector<std::complex<double>>& scratch) {
        std::copy(in + r * nk, in + (r + 1) * nk, scratch.begin());
        backward_row(p, nx, scratch.data(), out + r * nx);
    };
    if (exec == Exec::Serial) {
        std::vector<std::complex<double>> scratch(nk);
        for (std::size_t r = 0; r < ny; ++r) one(r, scratch);
        return;
    }
#pragma omp parallel
    {
        std::vector<std::complex<double>> scratch(nk);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < as_signed(ny); ++i) one(static_cast<std::size_t>(i), scratch);
    }
}

void ddx_fft(const Grid& g, const double* in, double* out, Exec exec) {
    const std::size_t nx = g.nx();
    const std::size_t ny = g.ny();
    const FftPlans& p = plans_for(nx);
    if (exec == Exec::Serial) {
        std::vector<std::complex<double>> buf(nx / 2 + 1);
        for (std::size_t i = 0; i < ny; ++i) ddx_row(g, p, in + i * nx, out + i * nx, buf);
        return;
    }
#pragma omp parallel
    {
        std::vector<std::complex<double>> buf(nx / 2 + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < as_signed(ny); ++i) {
            const auto r = static_cast<std::size_t>(i);
            ddx_row(g, p, in + r * nx, out + r * nx, buf);
        }
    }
}

void ddx_direct(const Grid& g, const double* in, double* out) {
    const std::size_t nx = g.nx();
    const std::size_t half = nx / 2;
    const double n = static_cast<double>(nx);
    std::vector<double> cosv(nx), sinv(nx);
    for (std::size_t l = 0; l < nx; ++l) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(l) / n;
        cosv[l] = std::cos(a);
        sinv[l] = std::sin(a);
    }
    std::vector<double> re(half), im(half);
    for (std::size_t i = 0; i < g.ny(); ++i) {
        const double* f = in + i * nx;
        for (std::size_t k = 1; k < half; ++k) {
            double a = 0.0, b = 0.0;
            for (std::size_t l = 0; l < nx; ++l) {
                const std::size_t idx = (k * l) % nx;
                a += f[l] * cosv[idx];
                b -= f[l] * sinv[idx];
            }
            re[k] = a / n;
            im[k] = b / n;
        }
        for (std::size_t j = 0; j < nx; ++j) {
            double acc = 0.0;
            for (std::size_t k = 1; k < half; ++k) {
                const std::size_t idx = (k * j) % nx;
                const double kap = g.wavenumber(k);
                // 2 Re(i kap c_k e^{i k x_j})
                acc += -2.0 * kap * (re[k] * sinv[idx] + im[k] * cosv[idx]);
            }
            out[i * nx + j] = acc;
        }
    }
}

BandedLU::BandedLU(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(n * (2 * kl + ku + 1), 0.0), piv_(n, 0) {}

void BandedLU::set(std::size_t i, std::size_t j, double value) {
    if (j + kl_ < i || j > i + ku_) {
        throw std::out_of_range("BandedLU::set: entry outside the band");
    }
    at(i, j) = value;
    factored_ = false;
}

double BandedLU::get(std::size_t i, std::size_t j) const {
    if (j + kl_ < i || j > i + ku_ + kl_) return 0.0;
    return at(i, j);
}

void BandedLU::factor() {
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const std::size_t last_col = std::min(n_ - 1, k + ku_ + kl_);
        std::size_t p = k;
        double best = std::abs(at(k, k));
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            if (std::abs(at(i, k)) > best) {
                best = std::abs(at(i, k));
                p = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) {
            throw SingularSystem("banded system is singular at row " + std::to_string(k));
        }
        piv_[k] = p;
        if (p != k) {
            for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
        }
        const double pivot = at(k, k);
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double l = at(i, k) / pivot;
            at(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
        }
    }
    factored_ = true;
}

void BandedLU::solve_column(double* x) const {
    for (std::size_t k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= at(i, k) * x[k];
    }
    for (std::size_t kk = n_; kk-- > 0;) {
        const std::size_t last_col = std::min(n_ - 1, kk + ku_ + kl_);
        double s = x[kk];
        for (std::size_t j = kk + 1; j <= last_col; ++j) s -= at(kk, j) * x[j];
        x[kk] = s / at(kk, kk);
    }
}

void BandedLU::solve_block(double* rhs, std::size_t ncols, std::size_t c0, std::size_t c1) const {
    auto row = [&](std::size_t i) { return rhs + i * ncols; };
    for (std::size_t k = 0; k < n_; ++k) {
        if (piv_[k] != k) {
            double* a = row(k);
            double* b = row(piv_[k]);
            for (std::size_t c = c0; c < c1; ++c) std::swap(a[c], b[c]);
        }
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const double* xk = row(k);
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double l = at(i, k);
            double* xi = row(i);
            for (std::size_t c = c0; c < c1; ++c) xi[c] -= l * xk[c];
        }
    }
    for (std::size_t kk = n_; kk-- > 0;) {
        const std::size_t last_col = std::min(n_ - 1, kk + ku_ + kl_);
        double* xk = row(kk);
        for (std::size_t j = kk + 1; j <= last_col; ++j) {
            const double a = at(kk, j);
            const double* xj = row(j);
            for (std::size_t c = c0; c < c1; ++c) xk[c] -= a * xj[c];
        }
        const double d = at(kk, kk);
        for (std::size_t c = c0; c < c1; ++c) xk[c] /= d;
    }
}

void BandedLU::solve(double* rhs, std::size_t ncols, Exec exec) const {
    if (!factored_) throw std::logic_error("BandedLU::solve before factor");
    if (exec == Exec::Serial) {
        std::vector<double> col(n_);
        for (std::size_t c = 0; c < ncols; ++c) {
            for (std::size_t i = 0; i < n_; ++i) col[i] = rhs[i * ncols + c];
            solve_column(col.data());
            for (std::size_t i = 0; i < n_; ++i) rhs[i * ncols + c] = col[i];
        }
        return;
    }
    const std::size_t blocks = (ncols + kColumnBlock - 1) / kColumnBlock;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < as_signed(blocks); ++b) {
        const std::size_t c0 = static_cast<std::size_t>(b) * kColumnBlock;
        solve_block(rhs, ncols, c0, std::min(ncols, c0 + kColumnBlock));
    }
}

}  // namespace mhdbl::kernels
