#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mhdbl {

/// Finite-difference weights for one output node: out[i] = sum_k w[k] f[first + k].
struct Stencil {
    std::size_t first = 0;
    std::size_t size = 0;
    std::array<double, 6> w{};
};

/// Fornberg weights for the derivative of the given order at z using the
/// nodes xs. Exact for polynomials of degree < xs.size().
std::vector<double> fd_weights(double z, std::span<const double> xs, int order);

/// Discretization of the strip [0, L_x) x [0, y_max]: periodic in x with nx
/// equispaced samples, ny nodes in y (uniform or sinh-stretched toward the
/// wall). Owns the y-stencils and quadrature weights every operator uses.
///
/// Grids are immutable and shared between fields via shared_ptr<const Grid>.
class Grid {
public:
    /// Uniform y spacing.
    static std::shared_ptr<const Grid> uniform(std::size_t nx, std::size_t ny, double lx,
                                               double y_max);

    /// y = y_max * sinh(s xi) / sinh(s), xi in [0, 1]. stretch <= 0 means uniform.
    static std::shared_ptr<const Grid> stretched(std::size_t nx, std::size_t ny, double lx,
                                                 double y_max, double stretch);

    /// Arbitrary strictly increasing y nodes starting at 0.
    static std::shared_ptr<const Grid> from_nodes(std::size_t nx, double lx,
                                                  std::vector<double> y_nodes,
                                                  double stretch = 0.0);

    /// Copy whose first-derivative stencils are scaled by `scale`. Fault
    /// injection hook for the verification suites; never used in production.
    std::shared_ptr<const Grid> with_derivative_fault(double scale) const;

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return y_.size(); }
    std::size_t size() const { return nx_ * y_.size(); }
    double lx() const { return lx_; }
    double y_max() const { return y_.back(); }
    double stretch() const { return stretch_; }
    bool derivative_fault() const { return fault_ != 1.0; }

    std::span<const double> y() const { return y_; }
    double y(std::size_t i) const { return y_[i]; }
    double x(std::size_t j) const { return lx_ * static_cast<double>(j) / static_cast<double>(nx_); }
    double dx() const { return lx_ / static_cast<double>(nx_); }

    /// Angular wavenumber 2 pi k / L_x of rfft bin k.
    double wavenumber(std::size_t k) const;
    std::size_t nyquist() const { return nx_ / 2; }

    const Stencil& d1(std::size_t i) const { return d1_[i]; }
    const Stencil& d2(std::size_t i) const { return d2_[i]; }

    /// Quadrature node weights: int_0^{y_max} f dy ~ sum_i q_i f_i.
    std::span<const double> node_weights() const { return q_; }

    /// Weights for int_{y_i}^{y_{i+1}} f dy from the cubic through four nodes
    /// starting at interval_first(i).
    const std::array<double, 4>& interval_weights(std::size_t i) const { return iw_[i]; }
    std::size_t interval_first(std::size_t i) const { return ifirst_[i]; }

    bool same_shape(const Grid& other) const;

private:
    Grid(std::size_t nx, double lx, std::vector<double> y, double stretch);
    void build_operators();

    std::size_t nx_;
    double lx_;
    double stretch_;
    double fault_ = 1.0;
    std::vector<double> y_;
    std::vector<Stencil> d1_;
    std::vector<Stencil> d2_;
    std::vector<std::array<double, 4>> iw_;
    std::vector<std::size_t> ifirst_;
    std::vector<double> q_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace mhdbl
