#include "mhdbl/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mhdbl {

namespace {

void require_same(const Field& a, const Field& b) {
    if (&a.grid() != &b.grid() && !a.grid().same_shape(b.grid())) {
        throw std::invalid_argument("Field: grid mismatch");
    }
}

}  // namespace

Field::Field(GridPtr grid) : grid_(std::move(grid)), v_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size()) throw std::invalid_argument("Field: value count does not match grid");
}

bool Field::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double Field::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

Field& Field::operator+=(const Field& o) {
    require_same(*this, o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same(*this, o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

bool Field::identical(const Field& o) const {
    if (!grid_ || !o.grid_) return !grid_ && !o.grid_;
    if (!grid_->same_shape(*o.grid_)) return false;
    return std::memcmp(v_.data(), o.v_.data(), v_.size() * sizeof(double)) == 0;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field hadamard(const Field& a, const Field& b) {
    require_same(a, b);
    Field out(a.grid_ptr());
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = x[k] * y[k];
    return out;
}

Field scale_rows(const Field& f, std::span<const double> w) {
    if (w.size() != f.ny()) throw std::invalid_argument("scale_rows: profile length mismatch");
    Field out(f.grid_ptr());
    for (std::size_t i = 0; i < f.ny(); ++i) {
        auto src = f.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] * w[i];
    }
    return out;
}

double max_abs_diff(const Field& a, const Field& b) { return max_abs_diff_rows(a, b, 0, a.ny()); }

double max_abs_diff_rows(const Field& a, const Field& b, std::size_t row_begin, std::size_t row_end) {
    require_same(a, b);
    double m = 0.0;
    for (std::size_t i = row_begin; i < row_end; ++i) {
        auto x = a.row(i);
        auto y = b.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) m = std::max(m, std::abs(x[j] - y[j]));
    }
    return m;
}

}  // namespace mhdbl
