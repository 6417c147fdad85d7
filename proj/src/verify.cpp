#include "mhdbl/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mhdbl/cancellation.hpp"
#include "mhdbl/initial.hpp"
#include "mhdbl/norms.hpp"
#include "mhdbl/solver.hpp"

namespace mhdbl {

namespace {

constexpr double kAlphas[] = {0.25, 0.5};
constexpr double kTimes[] = {0.0, 1.0, 10.0};
constexpr double kBetas[] = {0.1, 0.25, 0.4};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

GridPtr sample_grid(double alpha, double t, double fault) {
    GridPtr g = Grid::uniform(8, 1025, 2.0 * std::numbers::pi, 14.0 * std::sqrt(bracket(t) / alpha));
    return fault == 1.0 ? g : g->with_derivative_fault(fault);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

Field admissible_field(const GridPtr& grid, double alpha, double t, std::mt19937_64& rng) {
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double a = alpha / (2.0 * bracket(t));
    const int modes = 1 + static_cast<int>(uni(rng) * 3.0);
    Field f(grid);
    for (int k = 0; k <= modes; ++k) {
        const double c = nrm(rng), phase = 2.0 * std::numbers::pi * uni(rng);
        const double p0 = nrm(rng), p1 = nrm(rng), p2 = nrm(rng);
        const double s = a * (1.0 + 3.0 * uni(rng));
        const double kappa = 2.0 * std::numbers::pi * k / grid->lx();
        for (std::size_t i = 0; i < grid->ny(); ++i) {
            const double y = grid->y(i);
            const double prof = c * (p0 + y * (p1 + y * p2)) * std::exp(-s * y * y);
            for (std::size_t j = 0; j < grid->nx(); ++j) f(i, j) += prof * std::cos(kappa * grid->x(j) + phase);
        }
    }
    return f;
}

SuiteResult poincare_suite(const VerifyOptions& opt) {
    const Timer clock;
    SuiteResult r;
    r.name = "poincare";
    r.threshold = 1.0 - 1e-8;
    r.worst = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opt.seed);
    for (double alpha : kAlphas) {
        for (double t : kTimes) {
            const GridPtr g = sample_grid(alpha, t, opt.derivative_fault);
            for (std::size_t n = 0; n < opt.samples; ++n) {
                const Field f = admissible_field(g, alpha, t, rng);
                for (int m = 0; m <= 3; ++m) r.worst = std::min(r.worst, poincare_check(f, alpha, t, m));
                ++r.samples;
            }
        }
    }
    r.passed = r.worst >= r.threshold;
    r.detail = "min ratio " + fmt(r.worst) + " over " + std::to_string(r.samples) + " fields, m = 0..3";
    r.seconds = clock.seconds();
    return r;
}

SuiteResult dissipation_suite(const VerifyOptions& opt) {
    const Timer clock;
    SuiteResult r;
    r.name = "dissipation";
    r.threshold = -1e-8;
    r.worst = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> tau_dist(0.05, 1.0);
    for (double alpha : kAlphas) {
        for (double t : kTimes) {
            const GridPtr g = sample_grid(alpha, t, opt.derivative_fault);
            for (std::size_t n = 0; n < opt.samples; ++n) {
                const Field f = admissible_field(g, alpha, t, rng);
                const double tau = tau_dist(rng);
                for (double beta : kBetas) {
                    const DissipationBound l = dissipation_check(f, tau, alpha, t, beta);
                    r.worst = std::min(r.worst, (l.lhs - l.rhs) / l.lhs);
                }
                ++r.samples;
            }
        }
    }
    r.passed = r.worst >= r.threshold;
    r.detail = "min (lhs - rhs) / lhs " + fmt(r.worst) + " over " + std::to_string(r.samples) + " fields x 3 betas";
    r.seconds = clock.seconds();
    return r;
}

SuiteResult transform_suite(const VerifyOptions& opt) {
    const Timer clock;
    SuiteResult r;
    r.name = "cancellation_round_trip";
    r.threshold = 1e-12;
    GridPtr g = Grid::stretched(16, 64, 2.0 * std::numbers::pi, 15.0, 3.0);
    if (opt.derivative_fault != 1.0) g = g->with_derivative_fault(opt.derivative_fault);
    std::mt19937_64 rng(opt.seed ^ 0xbf58476d1ce4e5b9ULL);
    std::uniform_real_distribution<double> eps(1e-3, 1.0), tt(0.0, 10.0);
    bool b_bitwise = true;
    for (std::size_t n = 0; n < opt.samples; ++n) {
        Shapes s = random_shapes(g, {4, 0.5, rng()});
        const double e = eps(rng);
        s.u *= e;
        s.b *= e;
        const PerturbationState st = make_state(s.u, s.b, erf_shear(g, tt(rng), 1.0), 1.0);
        const TransformedState ts = to_tilde(st);
        const PerturbationState back = from_tilde(ts);
        const TransformedState again = to_tilde(back);
        r.worst = std::max(r.worst, max_abs_diff(back.u, st.u) / std::max(st.u.max_abs(), 1e-300));
        r.worst = std::max(r.worst, max_abs_diff(again.u_tilde, ts.u_tilde) / std::max(ts.u_tilde.max_abs(), 1e-300));
        b_bitwise = b_bitwise && ts.b_tilde.identical(st.b) && back.b.identical(st.b);
        ++r.samples;
    }
    ShearProfile flat;
    flat.grid = g;
    flat.values.assign(g->ny(), 1.0);
    flat.dy1.assign(g->ny(), 0.0);
    flat.dy2.assign(g->ny(), 0.0);
    flat.dy3.assign(g->ny(), 0.0);
    const Shapes s = random_shapes(g, {3, 0.5, opt.seed});
    const PerturbationState st = make_state(s.u, s.b, flat, 1.0);
    const bool identity = max_abs_diff(to_tilde(st).u_tilde, st.u) == 0.0;
    r.passed = r.worst <= r.threshold && b_bitwise && identity;
    r.detail = "max relative round-trip error " + fmt(r.worst) + "; b~ bitwise " + (b_bitwise ? "yes" : "no") +
               "; identity without shear gradient " + (identity ? "yes" : "no");
    r.seconds = clock.seconds();
    return r;
}

SuiteResult psi_residual_suite(const VerifyOptions& opt) {
    const Timer clock;
    SuiteResult r;
    r.name = "psi_residual_order";
    r.threshold = 0.25;
    GridPtr g = Grid::uniform(16, 513, 2.0 * std::numbers::pi, 12.0);
    if (opt.derivative_fault != 1.0) g = g->with_derivative_fault(opt.derivative_fault);
    Shapes sh = random_shapes(g, {2, 0.5, opt.seed});
    sh.u *= 0.05;
    sh.b *= 0.05;
    PerturbationState s0 = make_state(sh.u, sh.b, erf_shear(g, 0.0, 1.0), 1.0);
    impose_boundary(s0);
    auto residual = [&](double dt) {
        Stepper st(g, {dt, 1.0});
        PerturbationState s = s0;
        double worst = 0.0;
        const auto n = static_cast<std::size_t>(std::lround(0.4 / dt));
        for (std::size_t k = 0; k < n; ++k) {
            PerturbationState next = st.step(s);
            if (k >= 2) worst = std::max(worst, interior_sup(psi_residual(s, next, dt)));
            s = std::move(next);
        }
        return worst;
    };
    const double r1 = residual(0.02), r2 = residual(0.01);
    const double ratio = r1 / r2;
    r.samples = 2;
    r.worst = std::abs(ratio / 4.0 - 1.0);
    r.passed = r.worst <= r.threshold;
    r.detail = "residual " + fmt(r1) + " -> " + fmt(r2) + " under dt halving, ratio " + fmt(ratio);
    r.seconds = clock.seconds();
    return r;
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opt) {
    return {poincare_suite(opt), dissipation_suite(opt), transform_suite(opt), psi_residual_suite(opt)};
}

nlohmann::json suites_json(const std::vector<SuiteResult>& suites) {
    nlohmann::json j;
    bool all = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const SuiteResult& s : suites) {
        all = all && s.passed;
        arr.push_back({{"name", s.name},
                       {"passed", s.passed},
                       {"samples", s.samples},
                       {"worst", s.worst},
                       {"threshold", s.threshold},
                       {"detail", s.detail},
                       {"seconds", s.seconds}});
    }
    j["passed"] = all;
    j["suites"] = arr;
    return j;
}

}  // namespace mhdbl
