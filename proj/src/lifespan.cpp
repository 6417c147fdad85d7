#include "mhdbl/lifespan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mhdbl/errors.hpp"
#include "mhdbl/initial.hpp"

namespace mhdbl {

namespace {

// b^q - a^q for 0 < a <= b without cancellation when b - a << a.
double pow_diff(double a, double b, double q) {
    return std::pow(a, q) * std::expm1(q * std::log1p((b - a) / a));
}

// exact moments of <s>^p over [t0, t1]: int <s>^p and int (<s> - <t0>) <s>^p
void moments(double t0, double t1, double p, double& w0, double& w1) {
    const double a = bracket(t0), b = bracket(t1);
    w0 = pow_diff(a, b, p + 1.0) / (p + 1.0);
    w1 = pow_diff(a, b, p + 2.0) / (p + 2.0) - a * w0;
}

std::string cell_name(double eps, double b_bar) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "eps%.6g_bbar%.6g", eps, b_bar);
    return buf;
}

nlohmann::json params_json(const LifespanParams& p) {
    return {{"epsilon", p.epsilon}, {"tau0", p.tau0},   {"delta", p.delta},   {"alpha", p.alpha},
            {"alpha_norm", p.alpha_norm}, {"beta1", p.beta1}, {"beta2", p.beta2}, {"K", p.K},
            {"eta1", p.eta1},       {"eta2", p.eta2},   {"C", p.C},           {"C0", p.C0},
            {"C_bar", p.C_bar},     {"lambda", p.lambda}, {"in_regime", p.in_regime}};
}

nlohmann::json trace_json(std::span<const TraceRow> rows) {
    nlohmann::json a = nlohmann::json::array();
    for (const TraceRow& r : rows) a.push_back({r.step, r.t, r.tau, r.xu, r.xb, r.du, r.db});
    return a;
}

std::vector<TraceRow> trace_from_json(const nlohmann::json& a) {
    std::vector<TraceRow> rows;
    for (const auto& e : a) {
        rows.push_back({e.at(0).get<std::uint64_t>(), e.at(1).get<double>(), e.at(2).get<double>(),
                        e.at(3).get<double>(), e.at(4).get<double>(), e.at(5).get<double>(), e.at(6).get<double>()});
    }
    return rows;
}

// Mutable state of one run between steps.
struct RunState {
    PerturbationState s;
    double tau = 0.0;
    double tau_eval = 0.0;  // radius the current norms were evaluated at
    double x0u = 0.0, x0b = 0.0;
    std::uint64_t step = 0;
    std::vector<TraceRow> trace;
};

TraceRow row_of(std::uint64_t step, double t, double tau, const MonitorPoint& mp) {
    return {step, t, tau, mp.u.total_x, mp.b.total_x, mp.u.total_d, mp.b.total_d};
}

ExperimentRecord integrate(const ExperimentConfig& cfg, RunState rs, Stepper& stepper) {
    const LifespanParams p = make_params(cfg.epsilon, cfg.c_shear, cfg.tau0, cfg.c0, cfg.c_bar);
    const Exec ex = cfg.solver.exec;
    const double floor = 0.25 * cfg.tau0;
    const auto n_steps = static_cast<std::uint64_t>(std::llround(cfg.solver.t_max / cfg.solver.dt));

    ExperimentRecord rec;
    rec.params = p;
    rec.b_bar = cfg.b_bar;
    rec.end_reason = EndReason::Horizon;

    MonitorPoint cur = monitor_point(to_tilde(rs.s, ex), rs.tau_eval, p.alpha_norm, cfg.m_max, ex);
    RateSample a = rate_sample(cur.u, cur.b);

    auto finish = [&](EndReason why, double t_end, std::string detail) {
        rec.end_reason = why;
        rec.t_end = t_end;
        rec.tau_final = rs.tau;
        rec.steps = rs.step;
        rec.cfl_warnings = stepper.history().cfl_warnings;
        rec.detail = std::move(detail);
        rec.trace = std::move(rs.trace);
        return rec;
    };

    while (rs.step < n_steps) {
        const double t_prev = rs.s.t;
        PerturbationState next;
        try {
            next = stepper.step(rs.s);
        } catch (const BlowupDetected& e) {
            ++rs.step;
            return finish(e.non_finite ? EndReason::NonFinite : EndReason::NormCap, e.time, e.what());
        }
        ++rs.step;
        MonitorPoint nxt;
        try {
            nxt = monitor_point(to_tilde(next, ex), rs.tau, p.alpha_norm, cfg.m_max, ex);
        } catch (const OverflowAtM& e) {
            rs.s = std::move(next);
            return finish(EndReason::NormCap, rs.s.t, e.what());
        }
        const RateSample b = rate_sample(nxt.u, nxt.b);
        if (!std::isfinite(b.x) || !std::isfinite(b.d)) {
            rs.s = std::move(next);
            return finish(EndReason::NonFinite, rs.s.t, "non-finite norms");
        }
        const double tau_prev = rs.tau;
        double tau_new;
        try {
            tau_new = tau_step(rs.tau, a, b, p);
        } catch (const RadiusCollapsed&) {
            tau_new = 0.0;
        }
        rs.tau_eval = rs.tau;
        rs.tau = tau_new;
        rs.s = std::move(next);
        a = b;
        if (rs.step % cfg.trace_every == 0 || tau_new < floor) rs.trace.push_back(row_of(rs.step, rs.s.t, rs.tau, nxt));

        if (tau_new < floor) {
            // crossing time from tau^{3/2} linear over the step
            const double s0 = std::pow(tau_prev, 1.5), s1 = std::pow(tau_new, 1.5), sf = std::pow(floor, 1.5);
            const double frac = (s0 - sf) / (s0 - s1);
            return finish(EndReason::RadiusFloor, t_prev + frac * (rs.s.t - t_prev), "tau below tau0/4");
        }
        if ((rs.x0u > 0.0 && nxt.u.total_x > cfg.norm_cap * rs.x0u) ||
            (rs.x0b > 0.0 && nxt.b.total_x > cfg.norm_cap * rs.x0b)) {
            return finish(EndReason::NormCap, rs.s.t, "norm above cap");
        }
        if (cfg.checkpoint_every > 0 && !cfg.out_dir.empty() && rs.step % cfg.checkpoint_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "ckpt_%08llu", static_cast<unsigned long long>(rs.step));
            const nlohmann::json meta = {{"kind", "lifespan"},  {"step", rs.step},   {"tau", rs.tau},
                                         {"tau_eval", rs.tau_eval}, {"x0u", rs.x0u}, {"x0b", rs.x0b},
                                         {"seed", cfg.seed},    {"epsilon", cfg.epsilon}, {"trace", trace_json(rs.trace)}};
            write_checkpoint(cfg.out_dir / name, rs.s, stepper, meta);
        }
    }
    return finish(EndReason::Horizon, rs.s.t, "horizon reached");
}

void persist(const ExperimentConfig& cfg, const ExperimentRecord& rec) {
    if (cfg.out_dir.empty()) return;
    write_trace_csv(cfg.out_dir / "trace.csv", rec.trace);
    nlohmann::json j = {{"params", params_json(rec.params)},
                        {"b_bar", rec.b_bar},
                        {"seed", cfg.seed},
                        {"T_end", rec.t_end},
                        {"end_reason", end_reason_name(rec.end_reason)},
                        {"tau_final", rec.tau_final},
                        {"steps", rec.steps},
                        {"cfl_warnings", rec.cfl_warnings},
                        {"detail", rec.detail},
                        {"trace", "trace.csv"}};
    std::ofstream os(cfg.out_dir / "record.json");
    if (!os) throw Error("cannot write " + (cfg.out_dir / "record.json").string());
    os << j.dump(2) << '\n';
}

}  // namespace

LifespanParams make_params(double epsilon, double c_shear, double tau0, double c0, double c_bar) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("lifespan: epsilon must lie in [0, 1)");
    if (!(tau0 > 0.0)) throw DomainError("lifespan: tau0 must be positive");
    if (!(c_shear > 0.0)) throw DomainError("lifespan: shear constant must be positive");
    if (!(c0 >= 0.0)) throw DomainError("lifespan: C0 must be nonnegative");
    if (!(c_bar > 0.0)) throw DomainError("lifespan: C_bar must be positive");
    LifespanParams p;
    p.epsilon = epsilon;
    p.tau0 = tau0;
    p.C = c_shear;
    p.C0 = c0;
    p.C_bar = c_bar;
    if (epsilon == 0.0) {
        p.delta = 0.0;
        p.K = std::numeric_limits<double>::infinity();
        p.lambda = 2.0;
    } else {
        const double l = -std::log(epsilon);
        p.delta = 1.0 / l;
        p.K = 4.0 * c_shear / p.delta;
        p.lambda = 2.0 - 4.0 / (l + 2.0);
    }
    p.alpha = 0.5 - p.delta;
    p.alpha_norm = std::clamp(p.alpha, 0.25, 0.5);
    p.beta1 = p.beta2 = p.delta / 2.0;
    p.eta1 = p.delta;
    p.eta2 = p.delta / 8.0;
    p.in_regime = epsilon > 0.0 && epsilon < std::exp(-2.0);
    return p;
}

double theoretical_lifespan(double epsilon, double c_bar) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("theoretical_lifespan: epsilon must lie in (0, 1)");
    if (!(c_bar > 0.0)) throw DomainError("theoretical_lifespan: C_bar must be positive");
    const double l = std::log(1.0 / epsilon);
    const double base = 1.0 / (epsilon * l * l * l);
    return c_bar * std::pow(base, 2.0 - 4.0 / (l + 2.0)) - 1.0;
}

RateSample rate_sample(const NormBundle& u, const NormBundle& b) {
    return {u.t, u.total_x + b.total_x, u.total_d + b.total_d};
}

double rate_integral(const RateSample& a, const RateSample& b) {
    const double h = b.t - a.t;
    if (!(h > 0.0)) return 0.0;
    double x0, x1, d0, d1;
    moments(a.t, b.t, -0.25, x0, x1);
    moments(a.t, b.t, 0.25, d0, d1);
    const double xs = x1 / h, ds = d1 / h;
    return a.x * (x0 - xs) + b.x * xs + a.d * (d0 - ds) + b.d * ds;
}

double tau_step(double tau, const RateSample& a, const RateSample& b, const LifespanParams& p) {
    if (!(tau > 0.0)) throw RadiusCollapsed("tau_step: radius already nonpositive");
    const double integral = rate_integral(a, b);
    if (integral == 0.0) return tau;
    const double s = std::pow(tau, 1.5) - 1.5 * p.C0 * (p.K + 1.0) * integral;
    if (!(s > 0.0)) throw RadiusCollapsed("tau_step: radius collapsed at t = " + std::to_string(b.t));
    return std::min(tau, std::pow(s, 2.0 / 3.0));
}

double tau_step(double tau, const NormBundle& u0, const NormBundle& b0, const NormBundle& u1, const NormBundle& b1,
                const LifespanParams& p) {
    return tau_step(tau, rate_sample(u0, b0), rate_sample(u1, b1), p);
}

bool TauTrace::nonincreasing() const {
    for (std::size_t k = 1; k < tau.size(); ++k) {
        if (tau[k] > tau[k - 1]) return false;
    }
    return true;
}

GridPtr GridSpec::make() const {
    if (stretch > 0.0) return Grid::stretched(nx, ny, lx, y_max, stretch);
    return Grid::uniform(nx, ny, lx, y_max);
}

const char* end_reason_name(EndReason r) {
    switch (r) {
        case EndReason::RadiusFloor: return "radius-floor";
        case EndReason::NormCap: return "norm-cap";
        case EndReason::NonFinite: return "nonfinite";
        case EndReason::Horizon: return "horizon";
    }
    return "horizon";
}

void ExperimentConfig::validate() const {
    solver.validate();
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("lifespan: epsilon must lie in [0, 1)");
    if (!(tau0 > 0.0)) throw std::invalid_argument("lifespan: tau0 must be positive");
    if (m_max < 1 || m_max > 400) throw std::invalid_argument("lifespan: m_max must lie in [1, 400]");
    if (!(norm_cap > 1.0)) throw std::invalid_argument("lifespan: norm_cap must exceed 1");
    if (!(c0 >= 0.0)) throw std::invalid_argument("lifespan: c0 must be nonnegative");
    if (!(c_bar > 0.0)) throw std::invalid_argument("lifespan: c_bar must be positive");
    if (!(c_shear > 0.0)) throw std::invalid_argument("lifespan: c_shear must be positive");
    if (modes < 1) throw std::invalid_argument("lifespan: modes must be >= 1");
    if (trace_every < 1) throw std::invalid_argument("lifespan: trace_every must be >= 1");
}

TauTrace ExperimentRecord::tau_trace() const {
    TauTrace tt;
    for (const TraceRow& r : trace) {
        tt.t.push_back(r.t);
        tt.tau.push_back(r.tau);
    }
    return tt;
}

PerturbationState calibrated_initial(const GridPtr& grid, const ExperimentConfig& cfg) {
    ShearProfile shear = cfg.datum == ShearDatum::Cutoff ? cutoff_shear(grid, cfg.u_bar) : erf_shear(grid, 0.0, cfg.u_bar);
    PerturbationState s = make_state(Field(grid), Field(grid), shear, cfg.b_bar, cfg.solver.exec);
    if (cfg.epsilon == 0.0) return s;
    const Shapes sh = random_shapes(grid, {cfg.modes, 0.5, cfg.seed});
    s.u = sh.u;
    s.b = sh.b;
    impose_boundary(s, cfg.solver.exec);
    const double nu = seminorms(s.u, 2.0 * cfg.tau0, 0.5, 0.0, cfg.m_max).total_x;
    const double nb = seminorms(s.b, 2.0 * cfg.tau0, 0.5, 0.0, cfg.m_max).total_x;
    s.u *= cfg.epsilon / nu;
    s.b *= cfg.epsilon / nb;
    s.v = recover_normal(s.u, cfg.solver.exec);
    s.g = recover_normal(s.b, cfg.solver.exec);
    return s;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
    const GridPtr grid = cfg.grid.make();
    const LifespanParams p = make_params(cfg.epsilon, cfg.c_shear, cfg.tau0, cfg.c0, cfg.c_bar);
    RunState rs;
    rs.s = calibrated_initial(grid, cfg);
    rs.tau = rs.tau_eval = cfg.tau0;
    const MonitorPoint mp = monitor_point(to_tilde(rs.s, cfg.solver.exec), cfg.tau0, p.alpha_norm, cfg.m_max);
    rs.x0u = mp.u.total_x;
    rs.x0b = mp.b.total_x;
    rs.trace.push_back(row_of(0, rs.s.t, rs.tau, mp));
    Stepper stepper(grid, cfg.solver);
    ExperimentRecord rec = integrate(cfg, std::move(rs), stepper);
    persist(cfg, rec);
    return rec;
}

ExperimentRecord resume_experiment(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint) {
    cfg.validate();
    Checkpoint cp = read_checkpoint(checkpoint);
    if (cp.meta.value("kind", "") != "lifespan") throw Error("resume: " + checkpoint.string() + " is not a lifespan checkpoint");
    const GridPtr grid = cp.state.u.grid_ptr();
    RunState rs;
    rs.s = std::move(cp.state);
    rs.s.v = recover_normal(rs.s.u, cfg.solver.exec);
    rs.s.g = recover_normal(rs.s.b, cfg.solver.exec);
    rs.tau = cp.meta.at("tau").get<double>();
    rs.tau_eval = cp.meta.at("tau_eval").get<double>();
    rs.x0u = cp.meta.at("x0u").get<double>();
    rs.x0b = cp.meta.at("x0b").get<double>();
    rs.step = cp.meta.at("step").get<std::uint64_t>();
    rs.trace = trace_from_json(cp.meta.at("trace"));
    Stepper stepper(grid, cfg.solver);
    stepper.restore(std::move(cp.history));
    ExperimentRecord rec = integrate(cfg, std::move(rs), stepper);
    persist(cfg, rec);
    return rec;
}

static MonitorReport calibration_report(const ExperimentConfig& cfg, double t_cal) {
    cfg.validate();
    const GridPtr grid = cfg.grid.make();
    const LifespanParams p = make_params(cfg.epsilon, cfg.c_shear, cfg.tau0, 1.0, cfg.c_bar);
    PerturbationState s = calibrated_initial(grid, cfg);
    Stepper stepper(grid, cfg.solver);
    std::vector<MonitorPoint> pts;
    pts.push_back(monitor_point(to_tilde(s), cfg.tau0, p.alpha_norm, cfg.m_max));
    const auto n = static_cast<std::uint64_t>(std::llround(t_cal / cfg.solver.dt));
    for (std::uint64_t k = 0; k < n; ++k) {
        s = stepper.step(s);
        pts.push_back(monitor_point(to_tilde(s), cfg.tau0, p.alpha_norm, cfg.m_max));
    }
    return apriori_monitor(pts, cfg.c_shear, std::max(p.beta1, 1e-3));
}

double calibrate_c0(const ExperimentConfig& cfg, double t_cal) { return calibration_report(cfg, t_cal).c0_hat; }

double calibrate_c0_quadratic(const ExperimentConfig& cfg, double t_cal) {
    ExperimentConfig half = cfg;
    half.epsilon = 0.5 * cfg.epsilon;
    const MonitorReport a = calibration_report(cfg, t_cal);
    const MonitorReport b = calibration_report(half, t_cal);
    auto excess = [](const MonitorSample& q) {
        return q.dxu_dt + q.dxb_dt + q.su + q.sb - q.linear_u - q.linear_b - q.tau_dot * (q.yu + q.yb);
    };
    double c0 = 0.0;
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        const MonitorSample& q = a.samples[k];
        if (q.nonlinear > 0.0) c0 = std::max(c0, (excess(q) - 2.0 * excess(b.samples[k])) / (2.0 * q.nonlinear));
    }
    return c0;
}

LambdaFit fit_lambda(std::span<const ExperimentRecord> cells) {
    LambdaFit f;
    std::vector<double> xs, ys;
    for (const ExperimentRecord& r : cells) {
        if (r.end_reason == EndReason::Horizon) {
            ++f.censored;
            continue;
        }
        if (r.end_reason == EndReason::NonFinite && !(r.t_end > 0.0)) continue;
        if (!(r.t_end > 0.0) || !(r.params.epsilon > 0.0)) continue;
        f.epsilon.push_back(r.params.epsilon);
        xs.push_back(std::log(1.0 / r.params.epsilon));
        ys.push_back(std::log(r.t_end));
    }
    f.used = xs.size();
    const bool distinct = f.used >= 2 && std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end();
    if (!distinct) throw DegenerateFit("fit_lambda: need two finite lifespans at distinct epsilon, have " +
                                       std::to_string(f.used));
    const double n = static_cast<double>(f.used);
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < f.used; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < f.used; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    f.lambda = sxy / sxx;
    f.log_c = my - f.lambda * mx;
    for (std::size_t k = 0; k < f.used; ++k) f.residuals.push_back(ys[k] - (f.log_c + f.lambda * xs[k]));
    return f;
}

std::vector<ExperimentRecord> synthetic_records(std::span<const double> eps, double lambda, double c) {
    std::vector<ExperimentRecord> out;
    for (double e : eps) {
        ExperimentRecord r;
        r.params.epsilon = e;
        r.t_end = c * std::pow(e, -lambda);
        r.end_reason = EndReason::RadiusFloor;
        r.detail = "synthetic";
        out.push_back(r);
    }
    return out;
}

SweepResult sweep(const SweepConfig& cfg) {
    if (cfg.epsilon.empty() || cfg.b_bar.empty()) throw std::invalid_argument("sweep: empty epsilon or b_bar list");
    SweepResult res;
    if (cfg.c0_source == C0Source::Fixed) {
        res.c0 = cfg.base.c0;
    } else {
        ExperimentConfig cal = cfg.base;
        cal.epsilon = *std::max_element(cfg.epsilon.begin(), cfg.epsilon.end());
        cal.b_bar = 1.0;
        cal.out_dir.clear();
        res.c0 = cfg.c0_source == C0Source::Monitor ? calibrate_c0(cal, cfg.calibration_time)
                                                    : calibrate_c0_quadratic(cal, cfg.calibration_time);
        res.c0_calibrated = true;
        if (!(res.c0 > 0.0) || !std::isfinite(res.c0)) {
            res.warnings.push_back("monitor gave C0 = " + std::to_string(res.c0) + "; using the configured value");
            res.c0 = cfg.base.c0;
            res.c0_calibrated = false;
        }
    }

    const std::size_t ne = cfg.epsilon.size(), nb = cfg.b_bar.size(), n = ne * nb;
    res.cells.resize(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            ExperimentConfig c = cfg.base;
            c.b_bar = cfg.b_bar[k / ne];
            c.epsilon = cfg.epsilon[k % ne];
            c.c0 = res.c0;
            if (!cfg.base.out_dir.empty()) c.out_dir = cfg.base.out_dir / cell_name(c.epsilon, c.b_bar);
            try {
                res.cells[k] = run_experiment(c);
            } catch (const std::exception& e) {
                ExperimentRecord r;
                r.params.epsilon = c.epsilon;
                r.b_bar = c.b_bar;
                r.end_reason = EndReason::NonFinite;
                r.detail = std::string("cell failed: ") + e.what();
                res.cells[k] = std::move(r);
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t ib = 0; ib < nb; ++ib) {
        res.fit_b_bar.push_back(cfg.b_bar[ib]);
        const std::span<const ExperimentRecord> col(res.cells.data() + ib * ne, ne);
        for (const ExperimentRecord& r : col) {
            if (r.detail.rfind("cell failed", 0) == 0) res.warnings.push_back(r.detail);
        }
        try {
            res.fits.emplace_back(fit_lambda(col));
            res.fit_errors.emplace_back();
        } catch (const DegenerateFit& e) {
            res.fits.emplace_back(std::nullopt);
            res.fit_errors.emplace_back(e.what());
        }
    }

    const auto mhd = std::find(cfg.b_bar.begin(), cfg.b_bar.end(), 1.0);
    const auto prandtl = std::find(cfg.b_bar.begin(), cfg.b_bar.end(), 0.0);
    if (mhd != cfg.b_bar.end() && prandtl != cfg.b_bar.end()) {
        const std::size_t i1 = static_cast<std::size_t>(mhd - cfg.b_bar.begin());
        const std::size_t i0 = static_cast<std::size_t>(prandtl - cfg.b_bar.begin());
        for (std::size_t ie = 0; ie < ne; ++ie) {
            const double t1 = res.cells[i1 * ne + ie].t_end, t0 = res.cells[i0 * ne + ie].t_end;
            res.stabilization.push_back({cfg.epsilon[ie], t1, t0, t1 >= t0});
        }
    }
    return res;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(17);
    os << "step,t,tau,Xu,Xb,Du,Db\n";
    for (const TraceRow& r : rows) {
        os << r.step << ',' << r.t << ',' << r.tau << ',' << r.xu << ',' << r.xb << ',' << r.du << ',' << r.db << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> cells) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(17);
    os << "epsilon,b_bar,T_end,end_reason,tau_final\n";
    for (const ExperimentRecord& r : cells) {
        os << r.params.epsilon << ',' << r.b_bar << ',' << r.t_end << ',' << end_reason_name(r.end_reason) << ','
           << r.tau_final << '\n';
    }
}

}  // namespace mhdbl
