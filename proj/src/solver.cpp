#include "mhdbl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mhdbl/errors.hpp"
#include "mhdbl/operators.hpp"
#include "mhdbl/snapshot.hpp"

namespace mhdbl {

namespace {

bool par(Exec e) { return e == Exec::Parallel; }

void require_finite(const Tendency& r, double t) {
    if (!r.du.all_finite() || !r.db.all_finite()) throw NonFiniteTendency(t);
}

const char* datum_name(ShearDatum d) {
    switch (d) {
        case ShearDatum::Erf: return "erf";
        case ShearDatum::Cutoff: return "cutoff";
        case ShearDatum::Custom: return "custom";
    }
    return "custom";
}

ShearDatum datum_from(const std::string& s) {
    if (s == "erf") return ShearDatum::Erf;
    if (s == "cutoff") return ShearDatum::Cutoff;
    if (s == "custom") return ShearDatum::Custom;
    throw Error("checkpoint: unknown shear datum '" + s + "'");
}

}  // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("solver: t_max must be >= 0");
    if (!(blowup_threshold > 0.0)) throw std::invalid_argument("solver: blowup_threshold must be positive");
    if (kappa != 1.0) throw std::invalid_argument("solver: only kappa = 1 is supported");
}

Tendency explicit_terms(const PerturbationState& s, Exec exec) {
    const Grid& g = s.u.grid();
    const Field ux = ddx(s.u, exec);
    const Field bx = ddx(s.b, exec);
    const Field uy = ddy(s.u, 1, exec);
    const Field by = ddy(s.b, 1, exec);
    Field v = cumint_y(ux, exec);
    Field gn = cumint_y(bx, exec);
    Tendency r{Field(s.u.grid_ptr()), Field(s.u.grid_ptr())};
    const std::size_t ny = g.ny(), nx = g.nx();
    const double bb = s.b_bar;
#pragma omp parallel for schedule(static) if (par(exec))
    for (std::size_t i = 0; i < ny; ++i) {
        const double us = s.shear.values[i];
        const double us1 = s.shear.dy1[i];
        for (std::size_t j = 0; j < nx; ++j) {
            const double u = s.u(i, j), b = s.b(i, j);
            const double vv = -v(i, j), gg = -gn(i, j);
            r.du(i, j) = -(us + u) * ux(i, j) - vv * (us1 + uy(i, j)) + (bb + b) * bx(i, j) + gg * by(i, j);
            r.db(i, j) = (bb + b) * ux(i, j) + gg * (us1 + uy(i, j)) - (us + u) * bx(i, j) - vv * by(i, j);
        }
    }
    require_finite(r, s.t);
    return r;
}

Tendency rhs_primitive(const PerturbationState& s, Exec exec) {
    Tendency r = explicit_terms(s, exec);
    r.du += ddy(s.u, 2, exec);
    r.db += ddy(s.b, 2, exec);
    require_finite(r, s.t);
    return r;
}

Tendency rhs_transformed(const TransformedState& ts, Exec exec) {
    const Grid& g = ts.u_tilde.grid();
    const Field psi = compute_psi(ts.b_tilde, exec);
    const Field u = ts.u_tilde + scale_rows(psi, ts.shear.dy1);
    const Field& b = ts.b_tilde;
    const Field v = recover_normal(u, exec);
    const Field gn = recover_normal(b, exec);
    const Field utx = ddx(ts.u_tilde, exec);
    const Field uty = ddy(ts.u_tilde, 1, exec);
    const Field bx = ddx(b, exec);
    const Field by = ddy(b, 1, exec);
    Tendency r{ddy(ts.u_tilde, 2, exec), ddy(b, 2, exec)};
    const std::size_t ny = g.ny(), nx = g.nx();
    const double bb = ts.b_bar;
#pragma omp parallel for schedule(static) if (par(exec))
    for (std::size_t i = 0; i < ny; ++i) {
        const double us = ts.shear.values[i];
        const double us1 = ts.shear.dy1[i];
        const double us2 = ts.shear.dy2[i];
        for (std::size_t j = 0; j < nx; ++j) {
            const double uu = u(i, j), bv = b(i, j), vv = v(i, j), gg = gn(i, j), ps = psi(i, j);
            r.du(i, j) += -(us + uu) * utx(i, j) - vv * uty(i, j) + (bb + bv) * bx(i, j) + gg * by(i, j) +
                          2.0 * us2 * bv - vv * us2 * ps + (bb - 1.0) * vv * us1;
            r.db(i, j) += (bb + bv) * utx(i, j) + gg * uty(i, j) - (us + uu) * bx(i, j) - vv * by(i, j) +
                          gg * us2 * ps + (1.0 - bb) * gg * us1;
        }
    }
    require_finite(r, ts.t);
    return r;
}

Tendency chain_rule_transform(const PerturbationState& s, const Tendency& primitive, Exec exec) {
    const Field psi = compute_psi(s.b, exec);
    const Field dpsi = compute_psi(primitive.db, exec);
    Tendency r{primitive.du - scale_rows(psi, s.shear.dy3) - scale_rows(dpsi, s.shear.dy1), primitive.db};
    return r;
}

void impose_boundary(PerturbationState& s, Exec exec) {
    const Grid& g = s.u.grid();
    const std::size_t ny = g.ny(), nx = g.nx();
    for (std::size_t j = 0; j < nx; ++j) {
        s.u(0, j) = 0.0;
        s.u(ny - 1, j) = 0.0;
        s.b(ny - 1, j) = 0.0;
    }
    const Stencil& st = g.d1(0);
    for (std::size_t j = 0; j < nx; ++j) {
        double acc = 0.0;
        for (std::size_t k = 1; k < st.size; ++k) acc += st.w[k] * s.b(st.first + k, j);
        s.b(0, j) = -acc / st.w[0];
    }
    s.v = recover_normal(s.u, exec);
    s.g = recover_normal(s.b, exec);
}

Stepper::Stepper(GridPtr grid, SolverConfig cfg)
    : grid_(std::move(grid)), cfg_(cfg), lhs_u_(grid_->ny(), 4, 4), lhs_b_(grid_->ny(), 4, 4) {
    cfg_.validate();
    const std::size_t ny = grid_->ny();
    const double half = 0.5 * cfg_.dt;
    lhs_u_.set(0, 0, 1.0);
    lhs_u_.set(ny - 1, ny - 1, 1.0);
    lhs_b_.set(ny - 1, ny - 1, 1.0);
    const Stencil& n0 = grid_->d1(0);
    for (std::size_t k = 0; k < n0.size; ++k) lhs_b_.set(0, n0.first + k, n0.w[k]);
    for (std::size_t i = 1; i + 1 < ny; ++i) {
        const Stencil& s = grid_->d2(i);
        for (std::size_t k = 0; k < s.size; ++k) {
            const std::size_t j = s.first + k;
            const double a = (i == j ? 1.0 : 0.0) - half * s.w[k];
            lhs_u_.set(i, j, a);
            lhs_b_.set(i, j, a);
        }
    }
    lhs_u_.factor();
    lhs_b_.factor();
}

ShearProfile Stepper::advance_shear(const ShearProfile& p) {
    if (p.datum == ShearDatum::Erf) return erf_shear(grid_, p.t + cfg_.dt, p.u_bar);
    if (!heat_) heat_.emplace(grid_, cfg_.dt, p.u_bar);
    return heat_->step(p);
}

double Stepper::cfl_number(const PerturbationState& s) const {
    const Grid& g = *grid_;
    const double kmax = g.wavenumber(g.nyquist() - 1);
    double umax = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < g.ny(); ++i) {
        for (std::size_t j = 0; j < g.nx(); ++j) {
            umax = std::max(umax, std::abs(s.shear.values[i] + s.u(i, j)));
            bmax = std::max(bmax, std::abs(s.b_bar + s.b(i, j)));
        }
    }
    double hmin = g.y(1) - g.y(0);
    for (std::size_t i = 1; i + 1 < g.ny(); ++i) hmin = std::min(hmin, g.y(i + 1) - g.y(i));
    double c = cfg_.dt * (kmax * (umax + bmax) + s.v.max_abs() / hmin);
    if (cfg_.scheme == Scheme::Explicit) c += cfg_.dt * 16.0 / (3.0 * hmin * hmin) / 4.0;
    return c;
}

PerturbationState Stepper::step(const PerturbationState& s) {
    const Grid& g = *grid_;
    const std::size_t ny = g.ny(), nx = g.nx();
    const double dt = cfg_.dt;
    const Exec ex = cfg_.exec;

    last_cfl_ = cfl_number(s);
    if (last_cfl_ > 0.5) ++hist_.cfl_warnings;

    Tendency n;
    try {
        n = explicit_terms(s, ex);
    } catch (const NonFiniteTendency& e) {
        throw BlowupDetected(e.time, "non-finite tendency", true);
    }
    Field au = n.du, ab = n.db;
    if (hist_.valid) {
        au *= 1.5;
        ab *= 1.5;
        au -= 0.5 * hist_.nu_prev;
        ab -= 0.5 * hist_.nb_prev;
    }

    PerturbationState out;
    out.b_bar = s.b_bar;
    if (cfg_.scheme == Scheme::ImexCN) {
        Field ru = s.u + (0.5 * dt) * ddy(s.u, 2, ex);
        Field rb = s.b + (0.5 * dt) * ddy(s.b, 2, ex);
        ru += dt * au;
        rb += dt * ab;
        for (std::size_t j = 0; j < nx; ++j) {
            ru(0, j) = 0.0;
            ru(ny - 1, j) = 0.0;
            rb(0, j) = 0.0;
            rb(ny - 1, j) = 0.0;
        }
        lhs_u_.solve(ru.data(), nx, ex);
        lhs_b_.solve(rb.data(), nx, ex);
        out.u = std::move(ru);
        out.b = std::move(rb);
        out.v = recover_normal(out.u, ex);
        out.g = recover_normal(out.b, ex);
    } else {
        out.u = s.u + dt * (ddy(s.u, 2, ex) + au);
        out.b = s.b + dt * (ddy(s.b, 2, ex) + ab);
        impose_boundary(out, ex);
    }
    out.shear = advance_shear(s.shear);
    out.t = s.t + dt;
    out.shear.t = out.t;

    hist_.nu_prev = std::move(n.du);
    hist_.nb_prev = std::move(n.db);
    hist_.valid = true;
    ++hist_.steps;

    if (!out.u.all_finite() || !out.b.all_finite()) throw BlowupDetected(out.t, "non-finite field", true);
    const double peak = std::max(out.u.max_abs(), out.b.max_abs());
    if (peak > cfg_.blowup_threshold) throw BlowupDetected(out.t, "amplitude above threshold");
    return out;
}

void write_checkpoint(const std::filesystem::path& stem, const PerturbationState& s, const Stepper& stepper,
                      const nlohmann::json& meta) {
    const GridPtr& grid = s.u.grid_ptr();
    Snapshot snap;
    snap.grid = grid;
    snap.fields.emplace_back("u", s.u);
    snap.fields.emplace_back("b", s.b);
    const StepHistory& h = stepper.history();
    if (h.valid) {
        snap.fields.emplace_back("nu_prev", h.nu_prev);
        snap.fields.emplace_back("nb_prev", h.nb_prev);
    }
    Field shear(grid);
    for (std::size_t i = 0; i < grid->ny(); ++i) {
        for (double& x : shear.row(i)) x = s.shear.values[i];
    }
    snap.fields.emplace_back("shear", std::move(shear));
    write_snapshot(std::filesystem::path(stem).concat(".snap"), snap);

    const SolverConfig& c = stepper.config();
    nlohmann::json j;
    j["version"] = 1;
    j["t"] = s.t;
    j["b_bar"] = s.b_bar;
    j["shear"] = {{"datum", datum_name(s.shear.datum)}, {"t", s.shear.t}, {"u_bar", s.shear.u_bar}};
    j["solver"] = {{"dt", c.dt},
                   {"t_max", c.t_max},
                   {"scheme", c.scheme == Scheme::ImexCN ? "imex-cn" : "explicit"},
                   {"blowup_threshold", c.blowup_threshold},
                   {"kappa", c.kappa}};
    j["history"] = {{"valid", h.valid}, {"steps", h.steps}, {"cfl_warnings", h.cfl_warnings}};
    j["meta"] = meta;
    std::ofstream os(std::filesystem::path(stem).concat(".json"));
    if (!os) throw Error("checkpoint: cannot write " + stem.string() + ".json");
    os << j.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& stem) {
    const Snapshot snap = read_snapshot(std::filesystem::path(stem).concat(".snap"));
    std::ifstream is(std::filesystem::path(stem).concat(".json"));
    if (!is) throw Error("checkpoint: cannot read " + stem.string() + ".json");
    const nlohmann::json j = nlohmann::json::parse(is);

    Checkpoint cp;
    const auto& js = j.at("solver");
    cp.config.dt = js.at("dt").get<double>();
    cp.config.t_max = js.at("t_max").get<double>();
    cp.config.scheme = js.at("scheme").get<std::string>() == "explicit" ? Scheme::Explicit : Scheme::ImexCN;
    cp.config.blowup_threshold = js.at("blowup_threshold").get<double>();
    cp.config.kappa = js.at("kappa").get<double>();

    const auto& jsh = j.at("shear");
    const ShearDatum datum = datum_from(jsh.at("datum").get<std::string>());
    const double ts = jsh.at("t").get<double>();
    const double u_bar = jsh.at("u_bar").get<double>();
    ShearProfile shear;
    if (datum == ShearDatum::Erf) {
        shear = erf_shear(snap.grid, ts, u_bar);
    } else {
        const Field& f = snap.get("shear");
        std::vector<double> vals(snap.grid->ny());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(i, 0);
        shear = profile_from_values(snap.grid, ts, u_bar, std::move(vals), datum);
    }
    cp.state = make_state(snap.get("u"), snap.get("b"), std::move(shear), j.at("b_bar").get<double>());
    cp.state.t = j.at("t").get<double>();

    const auto& jh = j.at("history");
    cp.history.valid = jh.at("valid").get<bool>();
    cp.history.steps = jh.at("steps").get<std::uint64_t>();
    cp.history.cfl_warnings = jh.at("cfl_warnings").get<std::uint64_t>();
    if (cp.history.valid) {
        cp.history.nu_prev = snap.get("nu_prev");
        cp.history.nb_prev = snap.get("nb_prev");
    }
    cp.meta = j.value("meta", nlohmann::json::object());
    return cp;
}

}  // namespace mhdbl
