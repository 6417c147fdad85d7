#include "mhdbl/shear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "mhdbl/errors.hpp"
#include "mhdbl/operators.hpp"
#include "mhdbl/summation.hpp"

namespace mhdbl {

namespace {

// Stencil derivatives of a stepped profile carry round-off far out where the
// weight is astronomically large; the weighted norm ignores nodes past this.
constexpr double kLogWeightCap = 27.0;

void fill_numeric_derivatives(ShearProfile& p) {
    const Grid& g = *p.grid;
    p.dy1 = ddy_profile(g, p.values, 1);
    p.dy2 = ddy_profile(g, p.values, 2);
    p.dy3 = ddy_profile(g, p.dy2, 1);
}

double smootherstep7(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double s4 = s * s * s * s;
    return s4 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
}

}  // namespace

ShearProfile erf_shear(GridPtr grid, double t, double u_bar) {
    if (!(t >= 0.0)) throw std::invalid_argument("erf_shear: t must be >= 0");
    ShearProfile p;
    p.grid = grid;
    p.t = t;
    p.u_bar = u_bar;
    p.datum = ShearDatum::Erf;
    const std::size_t ny = grid->ny();
    p.values.resize(ny);
    p.dy1.resize(ny);
    p.dy2.resize(ny);
    p.dy3.resize(ny);
    const double tb = bracket(t);
    const double root = std::sqrt(tb);
    const double amp = u_bar / std::sqrt(std::numbers::pi * tb);
    for (std::size_t i = 0; i < ny; ++i) {
        const double y = grid->y(i);
        const double d1 = amp * std::exp(-y * y / (4.0 * tb));
        p.values[i] = u_bar * std::erf(y / (2.0 * root));
        p.dy1[i] = d1;
        p.dy2[i] = -y / (2.0 * tb) * d1;
        p.dy3[i] = (y * y / (4.0 * tb * tb) - 1.0 / (2.0 * tb)) * d1;
    }
    return p;
}

ShearProfile cutoff_shear(GridPtr grid, double u_bar) {
    std::vector<double> v(grid->ny());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u_bar * smootherstep7(grid->y(i) - 1.0);
    return profile_from_values(std::move(grid), 0.0, u_bar, std::move(v), ShearDatum::Cutoff);
}

ShearProfile profile_from_values(GridPtr grid, double t, double u_bar, std::vector<double> values,
                                 ShearDatum datum) {
    if (values.size() != grid->ny()) throw std::invalid_argument("profile_from_values: length mismatch");
    ShearProfile p;
    p.grid = std::move(grid);
    p.t = t;
    p.u_bar = u_bar;
    p.datum = datum;
    p.values = std::move(values);
    fill_numeric_derivatives(p);
    return p;
}

HeatStepper::HeatStepper(GridPtr grid, double dt, double u_bar)
    : grid_(std::move(grid)), dt_(dt), u_bar_(u_bar), lhs_(grid_->ny(), 4, 4) {
    if (!(dt > 0.0)) throw std::invalid_argument("HeatStepper: dt must be positive");
    const std::size_t ny = grid_->ny();
    lhs_.set(0, 0, 1.0);
    lhs_.set(ny - 1, ny - 1, 1.0);
    for (std::size_t i = 1; i + 1 < ny; ++i) {
        const Stencil& s = grid_->d2(i);
        for (std::size_t k = 0; k < s.size; ++k) {
            const std::size_t j = s.first + k;
            lhs_.set(i, j, (i == j ? 1.0 : 0.0) - 0.5 * dt_ * s.w[k]);
        }
    }
    lhs_.factor();
}

ShearProfile HeatStepper::step(const ShearProfile& p) const {
    const Grid& g = *grid_;
    const std::size_t ny = g.ny();
    std::vector<double> rhs(ny);
    const auto lap = ddy_profile(g, p.values, 2);
    for (std::size_t i = 0; i < ny; ++i) rhs[i] = p.values[i] + 0.5 * dt_ * lap[i];
    rhs[0] = 0.0;
    rhs[ny - 1] = u_bar_;
    lhs_.solve(rhs.data(), 1, Exec::Serial);
    const ShearDatum datum = p.datum == ShearDatum::Erf ? ShearDatum::Custom : p.datum;
    return profile_from_values(grid_, p.t + dt_, u_bar_, std::move(rhs), datum);
}

ShearProfile step_heat(const ShearProfile& p, double dt) { return HeatStepper(p.grid, dt, p.u_bar).step(p); }

std::vector<ShearProfile> shear_trace(ShearDatum datum, GridPtr grid, double u_bar,
                                      std::span<const double> times, double max_dt, double dt_fraction) {
    if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("shear_trace: times must be sorted");
    std::vector<ShearProfile> out;
    out.reserve(times.size());
    if (datum == ShearDatum::Erf) {
        for (double t : times) out.push_back(erf_shear(grid, t, u_bar));
        return out;
    }
    if (datum != ShearDatum::Cutoff) throw std::invalid_argument("shear_trace: only erf and cutoff data evolve");
    ShearProfile cur = cutoff_shear(grid, u_bar);
    for (double target : times) {
        const double span = target - cur.t;
        if (span > 0.0) {
            const double h = std::min(max_dt, dt_fraction * bracket(cur.t));
            const auto n = static_cast<std::size_t>(std::ceil(span / h));
            const HeatStepper stepper(grid, span / static_cast<double>(n), u_bar);
            for (std::size_t k = 0; k < n; ++k) cur = stepper.step(cur);
            cur.t = target;
        }
        out.push_back(cur);
    }
    return out;
}

double ls_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw InsufficientSamples("ls_slope: need >= 2 points");
    const double n = static_cast<double>(xs.size());
    const double mx = compensated_sum(xs) / n;
    const double my = compensated_sum(ys) / n;
    CompensatedSum sxy, sxx;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy.add((xs[k] - mx) * (ys[k] - my));
        sxx.add((xs[k] - mx) * (xs[k] - mx));
    }
    return sxy.value() / sxx.value();
}

HReport verify_H(std::span<const ShearProfile> trace, double alpha) {
    if (trace.size() < 20) throw InsufficientSamples("verify_H: need at least 20 profiles");
    HReport r;
    r.alpha = alpha;
    r.t0 = trace.front().t;
    r.t1 = trace.back().t;
    if (r.t0 < 1.0) throw InsufficientSamples("verify_H: window must start at t0 >= 1");
    if (r.t1 < 10.0 * r.t0) throw InsufficientSamples("verify_H: window must span t1 >= 10 t0");

    std::vector<double> lt, l1, l2, lw;
    r.l1_min = INFINITY;
    for (const ShearProfile& p : trace) {
        const Grid& g = *p.grid;
        HSample s{};
        s.t = p.t;
        std::vector<double> abs1(p.dy1.size());
        for (std::size_t i = 0; i < p.dy1.size(); ++i) {
            s.sup_dy1 = std::max(s.sup_dy1, std::abs(p.dy1[i]));
            s.sup_dy2 = std::max(s.sup_dy2, std::abs(p.dy2[i]));
            abs1[i] = std::abs(p.dy1[i]);
        }
        s.l1_dy1 = integrate_profile(g, abs1);
        const GaussianWeight w(alpha, p.t);
        std::vector<double> d2 = p.dy2;
        for (std::size_t i = 0; i < d2.size(); ++i) {
            if (w.log_value(g.y(i)) > kLogWeightCap) d2[i] = 0.0;
        }
        s.weighted_dy2 = weighted_l2_profile(g, d2, w);
        r.samples.push_back(s);

        const double tb = bracket(p.t);
        lt.push_back(std::log(tb));
        l1.push_back(std::log(s.sup_dy1));
        l2.push_back(std::log(s.sup_dy2));
        lw.push_back(std::log(s.weighted_dy2));
        r.l1_min = std::min(r.l1_min, s.l1_dy1);
        r.l1_max = std::max(r.l1_max, s.l1_dy1);
        r.c_dy1 = std::max(r.c_dy1, s.sup_dy1 * std::sqrt(tb));
        r.c_dy2 = std::max(r.c_dy2, s.sup_dy2 * tb);
        r.c_weighted = std::max(r.c_weighted, s.weighted_dy2 * std::pow(tb, 0.75));
    }
    r.slope_dy1 = ls_slope(lt, l1);
    r.slope_dy2 = ls_slope(lt, l2);
    r.slope_weighted = ls_slope(lt, lw);
    r.c_h = std::max({r.c_dy1, r.c_dy2, r.c_weighted, r.l1_max});
    return r;
}

void write_h_csv(const std::filesystem::path& path, const HReport& report) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(17);
    os << "t,sup_dy1,sup_dy2,l1_dy1,weighted_dy2\n";
    for (const HSample& s : report.samples) {
        os << s.t << ',' << s.sup_dy1 << ',' << s.sup_dy2 << ',' << s.l1_dy1 << ',' << s.weighted_dy2 << '\n';
    }
}

}  // namespace mhdbl
