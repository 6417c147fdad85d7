// Acceptance run: one PASS/FAIL line per criterion, indented detail below it.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mhdbl/cancellation.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/initial.hpp"
#include "mhdbl/lifespan.hpp"
#include "mhdbl/operators.hpp"
#include "mhdbl/shear.hpp"
#include "mhdbl/solver.hpp"
#include "mhdbl/verify.hpp"

using namespace mhdbl;
using std::numbers::pi;

namespace {

// Independent 30-digit evaluations (mpmath) of the lifespan formula with C_bar = 1.
constexpr double kLifespanInvE = 0.947734041054675856639;        // e^{2/3} - 1
constexpr double kLifespanHundredth = 0.0335007465224520321224;  // eps = 0.01

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> log_times(double t0, double t1, int n) {
    std::vector<double> ts(n);
    for (int k = 0; k < n; ++k) ts[k] = t0 * std::pow(t1 / t0, static_cast<double>(k) / (n - 1));
    return ts;
}

PerturbationState small_state(const GridPtr& g, double eps, std::uint64_t seed = 7) {
    Shapes s = random_shapes(g, {2, 0.5, seed});
    s.u *= eps;
    s.b *= eps;
    PerturbationState st = make_state(std::move(s.u), std::move(s.b), erf_shear(g, 0.0, 1.0), 1.0);
    impose_boundary(st);
    return st;
}

PerturbationState run(const GridPtr& g, SolverConfig cfg, PerturbationState s, std::size_t steps) {
    Stepper st(g, cfg);
    for (std::size_t k = 0; k < steps; ++k) s = st.step(s);
    return s;
}

double nested_diff(const Field& coarse, const Field& fine) {
    const std::size_t stride = (fine.ny() - 1) / (coarse.ny() - 1);
    double d = 0.0;
    for (std::size_t i = 0; i < coarse.ny(); ++i)
        for (std::size_t j = 0; j < coarse.nx(); ++j) d = std::max(d, std::abs(coarse(i, j) - fine(i * stride, j)));
    return d;
}

bool within(double ratio, double target, double rel) { return std::abs(ratio / target - 1.0) <= rel; }

Outcome from_suite(const SuiteResult& s, double max_seconds = 0.0) {
    Outcome o;
    o.require(s.passed, s.detail);
    if (max_seconds > 0.0) o.require(s.seconds < max_seconds, fmt("runtime %.1f s (< %.0f s)", s.seconds, max_seconds));
    o.note(fmt("%zu samples", s.samples));
    return o;
}

// The verification suites are shared by criteria 3, 4, 5 and the sweep by 8 and 10.
const std::vector<SuiteResult>& suites() {
    static const std::vector<SuiteResult> s = run_all_suites(VerifyOptions{});
    return s;
}

const SuiteResult& suite(const std::string& name) {
    for (const SuiteResult& s : suites())
        if (s.name == name) return s;
    throw Error("no suite " + name);
}

struct SweepRun {
    SweepResult result;
    double seconds = 0.0;
};

const SweepRun& default_sweep() {
    static const SweepRun run = [] {
        const auto t0 = std::chrono::steady_clock::now();
        SweepConfig cfg;  // default grid, eps {0.2, 0.1, 0.05, 0.025}, b_bar {1, 0}, monitor C0
        SweepRun r;
        r.result = sweep(cfg);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Outcome heat_oracle() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr g = Grid::uniform(4, 2048, 2 * pi, 15.0 * std::sqrt(2.0));
    ShearProfile p = erf_shear(g, 0.0, 1.0);
    const HeatStepper stepper(g, 1e-3, 1.0);
    for (int n = 0; n < 1000; ++n) p = stepper.step(p);
    const double secs = seconds_since(t0);
    const ShearProfile exact = erf_shear(g, 1.0, 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g->ny(); ++i) err = std::max(err, std::abs(p.values[i] - exact.values[i]));
    o.require(err <= 1e-6, fmt("sup |u - erf(y / (2 sqrt 2))| at t = 1: %.3e (<= 1e-6)", err));
    o.require(secs < 10.0, fmt("runtime %.2f s (< 10 s)", secs));
    return o;
}

Outcome shear_decay() {
    Outcome o;
    const GridPtr g = Grid::uniform(4, 2048, 2 * pi, 15.0 * std::sqrt(1001.0));
    const auto ts = log_times(10.0, 1000.0, 25);
    const HReport r = verify_H(shear_trace(ShearDatum::Erf, g, 1.0, ts), 0.5);
    o.require(std::abs(r.slope_dy1 + 0.5) <= 0.05, fmt("slope ||d_y u_s||_inf %.4f (-0.5 +- 0.05)", r.slope_dy1));
    o.require(std::abs(r.slope_dy2 + 1.0) <= 0.05, fmt("slope ||d_y^2 u_s||_inf %.4f (-1 +- 0.05)", r.slope_dy2));
    o.require(std::abs(r.slope_weighted + 0.75) <= 0.05,
              fmt("slope ||theta d_y^2 u_s||_L2 %.4f (-0.75 +- 0.05)", r.slope_weighted));
    double l1 = 0.0;
    for (const HSample& s : r.samples) l1 = std::max(l1, std::abs(s.l1_dy1 - 1.0));
    o.require(l1 <= 1e-6, fmt("max |int |d_y u_s| dy - u_bar| over %zu samples: %.2e (<= 1e-6)", r.samples.size(), l1));

    const GridPtr gc = Grid::stretched(4, 1024, 2 * pi, 15.0 * std::sqrt(1001.0), 4.0);
    const HReport c = verify_H(shear_trace(ShearDatum::Cutoff, gc, 1.0, log_times(10.0, 1000.0, 21)), 0.5);
    o.note(fmt("cutoff datum: slopes %.4f %.4f %.4f, C_H %.4g", c.slope_dy1, c.slope_dy2, c.slope_weighted, c.c_h));
    return o;
}

Outcome solver_invariants() {
    Outcome o;
    {
        const GridPtr g = Grid::stretched(16, 64, 2 * pi, 15.0, 3.0);
        PerturbationState s = make_state(Field(g), Field(g), erf_shear(g, 0.0, 1.0), 1.0);
        Stepper st(g, {1e-3, 10.0});
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) {
            s = st.step(s);
            worst = std::max({worst, s.u.max_abs(), s.b.max_abs(), s.v.max_abs(), s.g.max_abs()});
        }
        o.require(worst <= 1e-12, fmt("equilibrium over 1e4 steps: max |u, b, v, g| = %.2e (<= 1e-12)", worst));
    }
    {
        const GridPtr g = Grid::stretched(32, 96, 2 * pi, 15.0, 3.0);
        PerturbationState s = small_state(g, 0.05);
        Stepper st(g, {5e-3, 1.0});
        double div = 0.0;
        for (int k = 0; k < 200; ++k) {
            s = st.step(s);
            div = std::max({div, (s.v + cumint_y(ddx(s.u))).max_abs(), (s.g + cumint_y(ddx(s.b))).max_abs()});
        }
        o.require(div <= 1e-10, fmt("divergence |v + int d_x u|, |g + int d_x b| per step: %.2e (<= 1e-10)", div));
    }
    {
        const GridPtr g = Grid::stretched(32, 96, 2 * pi, 15.0, 3.0);
        const PerturbationState s = small_state(g, 0.05);
        const double dx = 0.37;
        const PerturbationState shifted = make_state(shift_x(s.u, dx), shift_x(s.b, dx), s.shear, s.b_bar);
        const PerturbationState a = run(g, {5e-3, 1.0}, s, 20), b = run(g, {5e-3, 1.0}, shifted, 20);
        const double err = std::max(max_abs_diff(shift_x(a.u, dx), b.u), max_abs_diff(shift_x(a.b, dx), b.b));
        o.require(err <= 1e-11, fmt("x-shift equivariance: %.2e (<= 1e-11)", err));
    }
    {
        const GridPtr g = Grid::stretched(16, 96, 2 * pi, 15.0, 3.0);
        const PerturbationState s0 = small_state(g, 0.05);
        std::vector<PerturbationState> sol;
        for (double dt : {0.02, 0.01, 0.005}) sol.push_back(run(g, {dt, 0.4}, s0, std::lround(0.4 / dt)));
        const double e1 = std::max(max_abs_diff(sol[0].u, sol[1].u), max_abs_diff(sol[0].b, sol[1].b));
        const double e2 = std::max(max_abs_diff(sol[1].u, sol[2].u), max_abs_diff(sol[1].b, sol[2].b));
        o.require(within(e1 / e2, 4.0, 0.25), fmt("dt refinement ratio %.3f (4 +- 25%%)", e1 / e2));
    }
    {
        std::vector<PerturbationState> sol;
        for (std::size_t ny : {65, 129, 257, 513}) {
            const GridPtr g = Grid::uniform(16, ny, 2 * pi, 12.0);
            sol.push_back(run(g, {2e-3, 0.1}, small_state(g, 0.05), 50));
        }
        double e[3];
        for (int k = 0; k < 3; ++k)
            e[k] = std::max(nested_diff(sol[k].u, sol[k + 1].u), nested_diff(sol[k].b, sol[k + 1].b));
        const bool ok = within(e[0] / e[1], 16.0, 0.25) && within(e[1] / e[2], 16.0, 0.25);
        o.require(ok, fmt("h refinement ratios %.2f, %.2f (16 +- 25%%)", e[0] / e[1], e[1] / e[2]));
    }
    return o;
}

Outcome psi_residual_order() {
    Outcome o;
    const GridPtr g = Grid::uniform(16, 513, 2 * pi, 12.0);
    const PerturbationState s0 = small_state(g, 0.05);
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
    o.require(within(r1 / r2, 4.0, 0.25),
              fmt("sup residual %.3e -> %.3e under dt halving, ratio %.3f (4 +- 25%%)", r1, r2, r1 / r2));
    return o;
}

Outcome radius_ode() {
    Outcome o;
    const LifespanParams p = make_params(0.05, 1.0, 0.5, 0.02);
    const double nx = 0.03, nd = 0.02, dt = 0.01;
    const int n = 1000;
    double tau = p.tau0;
    bool monotone = true;
    for (int k = 0; k < n; ++k) {
        RateSample a{k * dt, nx, nd}, b{(k + 1) * dt, nx, nd};
        const double next = tau_step(tau, a, b, p);
        monotone = monotone && next <= tau;
        tau = next;
    }
    const double tb = 1.0 + n * dt;
    const double integral = 4.0 / 3.0 * (std::pow(tb, 0.75) - 1.0) * nx + 4.0 / 5.0 * (std::pow(tb, 1.25) - 1.0) * nd;
    const double exact = std::pow(p.tau0, 1.5) - 1.5 * p.C0 * (p.K + 1.0) * integral;
    const double err = std::abs(std::pow(tau, 1.5) - exact);
    o.require(err <= 1e-10 && monotone, fmt("constant norms to t = 10: |tau^{3/2} - closed form| = %.2e (<= 1e-10)", err));

    std::size_t checked = 0, bad = 0;
    for (const ExperimentRecord& r : default_sweep().result.cells) {
        ++checked;
        if (!r.tau_trace().nonincreasing()) ++bad;
    }
    ExperimentConfig c;
    c.grid.nx = 16;
    c.grid.ny = 64;
    c.solver.t_max = 5.0;
    for (double eps : {0.2, 0.05}) {
        for (double c0 : {0.05, 0.5}) {
            c.epsilon = eps;
            c.c0 = c0;
            ++checked;
            if (!run_experiment(c).tau_trace().nonincreasing()) ++bad;
        }
    }
    o.require(bad == 0, fmt("tau nonincreasing on %zu real trajectories (%zu violations)", checked, bad));
    return o;
}

Outcome lifespan_formula() {
    Outcome o;
    const double a = theoretical_lifespan(std::exp(-1.0), 1.0);
    const double b = theoretical_lifespan(0.01, 1.0);
    const double ra = std::abs(a / kLifespanInvE - 1.0), rb = std::abs(b / kLifespanHundredth - 1.0);
    o.require(ra <= 1e-6, fmt("eps = 1/e: %.15f vs %.15f, rel %.1e (<= 1e-6)", a, kLifespanInvE, ra));
    o.require(rb <= 1e-6, fmt("eps = 0.01: %.15f vs %.15f, rel %.1e (<= 1e-6)", b, kLifespanHundredth, rb));
    double worst = 0.0;
    for (double eps : {0.01, 0.05, std::exp(-1.0), 0.3})
        for (double cb : {0.5, 2.0, 3.7, 10.0}) {
            const double base = theoretical_lifespan(eps, 1.0) + 1.0;
            worst = std::max(worst, std::abs((theoretical_lifespan(eps, cb) + 1.0) / (cb * base) - 1.0));
        }
    o.require(worst <= 4e-16, fmt("(T + 1) linear in C_bar: worst relative defect %.1e", worst));
    return o;
}

Outcome stabilization_sweep() {
    Outcome o;
    const SweepRun& run = default_sweep();
    const SweepResult& r = run.result;
    const std::size_t ne = 4;
    o.note(fmt("C0 = %.6g (%s)", r.c0, r.c0_calibrated ? "a-priori monitor" : "configured"));
    for (const ExperimentRecord& c : r.cells)
        o.note(fmt("b_bar %.0f  eps %-6.3g T_end %-12.6g %s", c.b_bar, c.params.epsilon, c.t_end,
                   end_reason_name(c.end_reason)));
    bool increasing = true;
    for (std::size_t k = 1; k < ne; ++k) increasing = increasing && r.cells[k].t_end > r.cells[k - 1].t_end;
    o.require(increasing, "b_bar = 1: T_end strictly increasing as eps decreases");
    for (const StabilizationRow& s : r.stabilization)
        o.require(s.stabilized, fmt("eps %-6.3g T(b_bar=1) %.6g >= T(b_bar=0) %.6g  (ratio %.4f)", s.epsilon, s.t_mhd,
                                    s.t_prandtl, s.t_mhd / s.t_prandtl));
    for (std::size_t i = 0; i < r.fits.size(); ++i) {
        if (r.fits[i]) {
            std::string res;
            for (double x : r.fits[i]->residuals) res += fmt(" %+.3f", x);
            o.note(fmt("b_bar %.0f: lambda_fit %.4f (%zu cells, %zu censored), residuals%s", r.fit_b_bar[i],
                       r.fits[i]->lambda, r.fits[i]->used, r.fits[i]->censored, res.c_str()));
        } else {
            o.note(fmt("b_bar %.0f: no fit (%s)", r.fit_b_bar[i], r.fit_errors[i].c_str()));
        }
    }
    o.require(r.fits.size() == 2 && r.fits[0].has_value(), "lambda_fit reported with residuals");
    o.require(run.seconds <= 1800.0, fmt("sweep runtime %.1f s (<= 30 min)", run.seconds));
    return o;
}

Outcome determinism() {
    Outcome o;
    ExperimentConfig c;
    c.grid.nx = 16;
    c.grid.ny = 64;
    c.c0 = 0.3;
    c.solver.t_max = 2.0;
    const ExperimentRecord a = run_experiment(c), b = run_experiment(c);
    bool same = a.trace.size() == b.trace.size() && a.t_end == b.t_end;
    for (std::size_t k = 0; same && k < a.trace.size(); ++k)
        same = a.trace[k].tau == b.trace[k].tau && a.trace[k].xu == b.trace[k].xu && a.trace[k].xb == b.trace[k].xb &&
               a.trace[k].du == b.trace[k].du && a.trace[k].db == b.trace[k].db;
    o.require(same, fmt("repeat run: %zu trace rows bitwise equal", a.trace.size()));

    SweepConfig sc;
    sc.base = c;
    sc.epsilon = {0.2, 0.1};
    sc.c0_source = C0Source::Fixed;
    sc.jobs = 1;
    const SweepResult s1 = sweep(sc);
    sc.jobs = 3;
    const SweepResult s3 = sweep(sc);
    bool jobs_same = s1.cells.size() == s3.cells.size();
    for (std::size_t k = 0; jobs_same && k < s1.cells.size(); ++k)
        jobs_same = s1.cells[k].t_end == s3.cells[k].t_end && s1.cells[k].trace.size() == s3.cells[k].trace.size();
    o.require(jobs_same, "sweep cells identical for 1 and 3 jobs");

    for (ShearDatum datum : {ShearDatum::Erf, ShearDatum::Cutoff}) {
        ExperimentConfig k = c;
        k.datum = datum;
        k.checkpoint_every = 25;
        k.out_dir = std::filesystem::temp_directory_path() / "mhdbl_acceptance_ckpt";
        std::filesystem::remove_all(k.out_dir);
        const ExperimentRecord full = run_experiment(k);
        const auto stem = k.out_dir / "ckpt_00000025";
        bool restart = std::filesystem::exists(stem.string() + ".json");
        if (restart) {
            const ExperimentRecord again = resume_experiment(k, stem);
            restart = again.t_end == full.t_end && again.steps == full.steps && again.trace.size() == full.trace.size();
            for (std::size_t i = 0; restart && i < full.trace.size(); ++i)
                restart = full.trace[i].t == again.trace[i].t && full.trace[i].tau == again.trace[i].tau &&
                          full.trace[i].xu == again.trace[i].xu && full.trace[i].xb == again.trace[i].xb &&
                          full.trace[i].du == again.trace[i].du && full.trace[i].db == again.trace[i].db;
        }
        o.require(restart, fmt("%s datum: restart from step 25 of %llu reproduces the run bitwise",
                               datum == ShearDatum::Erf ? "erf" : "cutoff", static_cast<unsigned long long>(full.steps)));
        std::filesystem::remove_all(k.out_dir);
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"heat oracle", heat_oracle},
        {"shear decay rates", shear_decay},
        {"weighted Poincare suite", [] { return from_suite(suite("poincare"), 60.0); }},
        {"weighted dissipation suite", [] { return from_suite(suite("dissipation")); }},
        {"cancellation transform", [] { return from_suite(suite("cancellation_round_trip")); }},
        {"solver invariants", solver_invariants},
        {"psi residual order", psi_residual_order},
        {"radius ODE", radius_ode},
        {"lifespan formula", lifespan_formula},
        {"scaling and stabilization sweep", stabilization_sweep},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %zu: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    seconds_since(t0));
        for (const std::string& l : o.lines) std::printf("    %s\n", l.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
