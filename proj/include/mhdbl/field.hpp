#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mhdbl/grid.hpp"

namespace mhdbl {

/// One scalar unknown sampled on a Grid, stored row-major with rows indexed
/// by y and columns by x: value(i, j) = f(x_j, y_i).
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid);
    Field(GridPtr grid, std::vector<double> values);

    template <typename F>
    static Field from_function(GridPtr grid, F&& f) {
        Field out(grid);
        for (std::size_t i = 0; i < grid->ny(); ++i) {
            for (std::size_t j = 0; j < grid->nx(); ++j) out(i, j) = f(grid->x(j), grid->y(i));
        }
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t nx() const { return grid_->nx(); }
    std::size_t ny() const { return grid_->ny(); }

    double operator()(std::size_t i, std::size_t j) const { return v_[i * grid_->nx() + j]; }
    double& operator()(std::size_t i, std::size_t j) { return v_[i * grid_->nx() + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(v_).subspan(i * grid_->nx(), grid_->nx());
    }
    std::span<double> row(std::size_t i) { return std::span<double>(v_).subspan(i * grid_->nx(), grid_->nx()); }

    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    bool all_finite() const;
    double max_abs() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

    /// Bitwise equality of grid shape and samples.
    bool identical(const Field& o) const;

private:
    GridPtr grid_;
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// f(i, j) * w[i] for a y-profile w.
Field scale_rows(const Field& f, std::span<const double> w);

double max_abs_diff(const Field& a, const Field& b);

/// Max over rows [row_begin, row_end) of |a - b|.
double max_abs_diff_rows(const Field& a, const Field& b, std::size_t row_begin, std::size_t row_end);

}  // namespace mhdbl
