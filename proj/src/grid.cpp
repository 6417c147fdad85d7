#include "mhdbl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mhdbl {

std::vector<double> fd_weights(double z, std::span<const double> xs, int order) {
    const std::size_t n = xs.size();
    const auto m = static_cast<std::size_t>(order);
    if (n == 0 || m >= n) throw std::invalid_argument("fd_weights: need more nodes than the order");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

namespace {

void validate(std::size_t nx, double lx, const std::vector<double>& y) {
    if (nx < 4 || nx % 2 != 0) {
        throw std::invalid_argument("Grid: nx must be even and >= 4 (got " + std::to_string(nx) + ")");
    }
    if (y.size() < 8) throw std::invalid_argument("Grid: ny must be >= 8");
    if (!(lx > 0.0) || !std::isfinite(lx)) throw std::invalid_argument("Grid: L_x must be positive");
    if (y.front() != 0.0) throw std::invalid_argument("Grid: y_nodes[0] must be 0");
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (!(y[i] > y[i - 1]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("Grid: y_nodes must be strictly increasing and finite");
        }
    }
}

Stencil make_stencil(std::span<const double> y, std::size_t i, std::size_t first, std::size_t width,
                     int order) {
    Stencil s;
    s.first = first;
    s.size = width;
    const auto w = fd_weights(y[i], y.subspan(first, width), order);
    std::copy(w.begin(), w.end(), s.w.begin());
    return s;
}

}  // namespace

Grid::Grid(std::size_t nx, double lx, std::vector<double> y, double stretch)
    : nx_(nx), lx_(lx), stretch_(stretch), y_(std::move(y)) {
    validate(nx_, lx_, y_);
    build_operators();
}

std::shared_ptr<const Grid> Grid::uniform(std::size_t nx, std::size_t ny, double lx, double y_max) {
    return stretched(nx, ny, lx, y_max, 0.0);
}

std::shared_ptr<const Grid> Grid::stretched(std::size_t nx, std::size_t ny, double lx, double y_max,
                                            double stretch) {
    if (!(y_max > 0.0)) throw std::invalid_argument("Grid: y_max must be positive");
    if (ny < 8) throw std::invalid_argument("Grid: ny must be >= 8");
    std::vector<double> y(ny);
    const double last = static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < ny; ++i) {
        const double xi = static_cast<double>(i) / last;
        y[i] = stretch > 0.0 ? y_max * std::sinh(stretch * xi) / std::sinh(stretch) : y_max * xi;
    }
    y.back() = y_max;
    return std::shared_ptr<const Grid>(new Grid(nx, lx, std::move(y), std::max(stretch, 0.0)));
}

std::shared_ptr<const Grid> Grid::from_nodes(std::size_t nx, double lx, std::vector<double> y_nodes,
                                             double stretch) {
    return std::shared_ptr<const Grid>(new Grid(nx, lx, std::move(y_nodes), stretch));
}

std::shared_ptr<const Grid> Grid::with_derivative_fault(double scale) const {
    auto g = std::shared_ptr<Grid>(new Grid(*this));
    g->fault_ = fault_ * scale;
    for (auto& s : g->d1_) {
        for (auto& w : s.w) w *= scale;
    }
    return g;
}

double Grid::wavenumber(std::size_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / lx_;
}

bool Grid::same_shape(const Grid& other) const {
    return nx_ == other.nx_ && lx_ == other.lx_ && y_ == other.y_;
}

void Grid::build_operators() {
    const std::size_t n = y_.size();
    const std::span<const double> y(y_);

    d1_.resize(n);
    d2_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t first1;
        if (i < 2) {
            first1 = 0;
        } else if (i + 2 >= n) {
            first1 = n - 5;
        } else {
            first1 = i - 2;
        }
        d1_[i] = make_stencil(y, i, first1, 5, 1);

        // Second derivative: centered five points in the interior, six
        // one-sided points next to the ends to keep fourth order there.
        if (i < 2) {
            d2_[i] = make_stencil(y, i, 0, 6, 2);
        } else if (i + 2 >= n) {
            d2_[i] = make_stencil(y, i, n - 6, 6, 2);
        } else {
            d2_[i] = make_stencil(y, i, i - 2, 5, 2);
        }
    }

    // Interval quadrature: integrate the cubic through four neighbouring
    // nodes with two-point Gauss-Legendre (exact for cubics).
    iw_.assign(n - 1, {});
    ifirst_.assign(n - 1, 0);
    q_.assign(n, 0.0);
    const double g = 1.0 / std::sqrt(3.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t first = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 1, 0,
                                                             static_cast<std::ptrdiff_t>(n - 4));
        ifirst_[i] = first;
        const double a = y_[i];
        const double b = y_[i + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        const std::array<double, 2> pts{mid - half * g, mid + half * g};
        std::array<double, 4> w{};
        for (double p : pts) {
            for (std::size_t j = 0; j < 4; ++j) {
                double l = 1.0;
                for (std::size_t k = 0; k < 4; ++k) {
                    if (k == j) continue;
                    l *= (p - y_[first + k]) / (y_[first + j] - y_[first + k]);
                }
                w[j] += half * l;
            }
        }
        iw_[i] = w;
        for (std::size_t j = 0; j < 4; ++j) q_[first + j] += w[j];
    }
}

}  // namespace mhdbl
