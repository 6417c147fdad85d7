#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "mhdbl/errors.hpp"
#include "mhdbl/initial.hpp"
#include "mhdbl/operators.hpp"
#include "mhdbl/solver.hpp"

using namespace mhdbl;
using std::numbers::pi;

namespace {

PerturbationState small_state(const GridPtr& g, double eps, double b_bar = 1.0, std::uint64_t seed = 7,
                              ShearProfile shear = {}) {
    Shapes s = random_shapes(g, {2, 0.5, seed});
    s.u *= eps;
    s.b *= eps;
    if (!shear.grid) shear = erf_shear(g, 0.0, 1.0);
    PerturbationState st = make_state(std::move(s.u), std::move(s.b), std::move(shear), b_bar);
    impose_boundary(st);
    return st;
}

PerturbationState run(const GridPtr& g, SolverConfig cfg, PerturbationState s, std::size_t steps) {
    Stepper st(g, cfg);
    for (std::size_t k = 0; k < steps; ++k) s = st.step(s);
    return s;
}

// |a - b| on the nodes of a shared with b, for nested uniform grids
double nested_diff(const Field& coarse, const Field& fine) {
    const std::size_t stride = (fine.ny() - 1) / (coarse.ny() - 1);
    double d = 0.0;
    for (std::size_t i = 0; i < coarse.ny(); ++i) {
        for (std::size_t j = 0; j < coarse.nx(); ++j) d = std::max(d, std::abs(coarse(i, j) - fine(i * stride, j)));
    }
    return d;
}

double divergence_defect(const Field& f, const Field& normal) {
    return (normal + cumint_y(ddx(f))).max_abs();
}

ShearProfile linear_shear(const GridPtr& g, double slope) {
    ShearProfile p;
    p.grid = g;
    p.u_bar = 1.0;
    p.datum = ShearDatum::Custom;
    for (std::size_t i = 0; i < g->ny(); ++i) p.values.push_back(slope * g->y(i));
    p.dy1.assign(g->ny(), slope);
    p.dy2.assign(g->ny(), 0.0);
    p.dy3.assign(g->ny(), 0.0);
    return p;
}

}  // namespace

TEST_CASE("recover_normal") {
    auto g = Grid::uniform(16, 1201, 2 * pi, 12.0);
    CHECK(recover_normal(Field(g)).max_abs() == 0.0);
    const Field f = Field::from_function(g, [](double x, double y) { return std::sin(x) * std::exp(-y * y); });
    const Field v = recover_normal(f);
    const Field exact = Field::from_function(
        g, [](double x, double y) { return -std::cos(x) * 0.5 * std::sqrt(pi) * std::erf(y); });
    CHECK(max_abs_diff(v, exact) < 1e-8);
    for (std::size_t j = 0; j < g->nx(); ++j) CHECK(v(0, j) == 0.0);

    const Field mean = Field::from_function(g, [](double, double y) { return std::exp(-y * y); });
    CHECK(recover_normal(mean).max_abs() < 1e-14);
}

TEST_CASE("primitive right-hand side") {
    auto g = Grid::stretched(16, 96, 2 * pi, 15.0, 3.0);
    SUBCASE("zero perturbation is steady") {
        const auto s = make_state(Field(g), Field(g), erf_shear(g, 0.3, 1.0), 1.0);
        const Tendency r = rhs_primitive(s);
        CHECK(r.du.max_abs() == 0.0);
        CHECK(r.db.max_abs() == 0.0);
    }
    SUBCASE("single mode with b = 0") {
        const double eps = 0.1;
        const Field u = Field::from_function(g, [&](double x, double y) { return eps * std::sin(x) * std::exp(-y * y); });
        const auto s = make_state(u, Field(g), erf_shear(g, 0.3, 1.0), 1.0);
        const Tendency r = rhs_primitive(s);
        const Field ux = ddx(u), uy = ddy(u, 1);
        Field expect = ddx(u) + ddy(Field(g), 2);
        for (std::size_t i = 0; i < g->ny(); ++i) {
            for (std::size_t j = 0; j < g->nx(); ++j) expect(i, j) = ux(i, j) + s.g(i, j) * (s.shear.dy1[i] + uy(i, j));
        }
        CHECK(max_abs_diff(r.db, expect) <= 1e-12);
    }
    SUBCASE("linearization error is quadratic") {
        const Shapes w = random_shapes(g, {3, 0.5, 11});
        const ShearProfile sh = erf_shear(g, 0.3, 1.0);
        auto defect = [&](double eps) {
            Field u = w.u, b = w.b;
            u *= eps;
            b *= eps;
            const auto s = make_state(u, b, sh, 1.0);
            const Tendency r = rhs_primitive(s);
            // linear part: drop every product of two perturbation factors
            const Field ux = ddx(u), bx = ddx(b), by = ddy(b, 1);
            Field lu = ddy(u, 2), lb = ddy(b, 2);
            for (std::size_t i = 0; i < g->ny(); ++i) {
                for (std::size_t j = 0; j < g->nx(); ++j) {
                    lu(i, j) += -sh.values[i] * ux(i, j) - s.v(i, j) * sh.dy1[i] + bx(i, j);
                    lb(i, j) += ux(i, j) + s.g(i, j) * sh.dy1[i] - sh.values[i] * bx(i, j);
                }
            }
            (void)by;
            return std::max(max_abs_diff(r.du, lu), max_abs_diff(r.db, lb));
        };
        const double ratio = defect(1e-2) / defect(5e-3);
        MESSAGE("linearization ratio " << ratio);
        CHECK(ratio == doctest::Approx(4.0).epsilon(1e-3));
    }
}

TEST_CASE("equilibrium is preserved") {
    auto g = Grid::stretched(16, 64, 2 * pi, 15.0, 3.0);
    PerturbationState s = make_state(Field(g), Field(g), erf_shear(g, 0.0, 1.0), 1.0);
    Stepper st(g, {1e-3, 10.0});
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        s = st.step(s);
        worst = std::max({worst, s.u.max_abs(), s.b.max_abs(), s.v.max_abs(), s.g.max_abs()});
    }
    CHECK(worst < 1e-12);
    CHECK(s.t == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("boundary and divergence constraints hold after every step") {
    auto g = Grid::stretched(32, 96, 2 * pi, 15.0, 3.0);
    PerturbationState s = small_state(g, 0.05);
    Stepper st(g, {5e-3, 1.0});
    double div = 0.0, wall = 0.0;
    for (int k = 0; k < 200; ++k) {
        s = st.step(s);
        div = std::max({div, divergence_defect(s.u, s.v), divergence_defect(s.b, s.g)});
        const Field by = ddy(s.b, 1);
        for (std::size_t j = 0; j < g->nx(); ++j) {
            wall = std::max({wall, std::abs(s.u(0, j)), std::abs(s.v(0, j)), std::abs(s.g(0, j)), std::abs(by(0, j)),
                             std::abs(s.u(g->ny() - 1, j)), std::abs(s.b(g->ny() - 1, j))});
        }
    }
    CHECK(div <= 1e-10);
    CHECK(wall <= 1e-14);
}

TEST_CASE("x-shift equivariance") {
    auto g = Grid::stretched(32, 96, 2 * pi, 15.0, 3.0);
    const PerturbationState s = small_state(g, 0.05);
    const double dx = 0.37;
    PerturbationState shifted = make_state(shift_x(s.u, dx), shift_x(s.b, dx), s.shear, s.b_bar);
    const SolverConfig cfg{5e-3, 1.0};
    const PerturbationState a = run(g, cfg, s, 20);
    const PerturbationState b = run(g, cfg, shifted, 20);
    const double err = std::max(max_abs_diff(shift_x(a.u, dx), b.u), max_abs_diff(shift_x(a.b, dx), b.b));
    MESSAGE("shift equivariance defect " << err);
    CHECK(err <= 1e-11);
}

TEST_CASE("time refinement is second order") {
    auto g = Grid::stretched(16, 96, 2 * pi, 15.0, 3.0);
    const PerturbationState s0 = small_state(g, 0.05);
    const double t_end = 0.4;
    std::vector<PerturbationState> sol;
    for (double dt : {0.02, 0.01, 0.005}) {
        const auto n = static_cast<std::size_t>(std::lround(t_end / dt));
        sol.push_back(run(g, {dt, t_end}, s0, n));
    }
    const double e1 = std::max(max_abs_diff(sol[0].u, sol[1].u), max_abs_diff(sol[0].b, sol[1].b));
    const double e2 = std::max(max_abs_diff(sol[1].u, sol[2].u), max_abs_diff(sol[1].b, sol[2].b));
    MESSAGE("dt ratio " << e1 / e2);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("space refinement is fourth order") {
    std::vector<PerturbationState> sol;
    for (std::size_t ny : {65, 129, 257, 513}) {
        auto g = Grid::uniform(16, ny, 2 * pi, 12.0);
        sol.push_back(run(g, {2e-3, 0.1}, small_state(g, 0.05), 50));
    }
    const double e1 = std::max(nested_diff(sol[0].u, sol[1].u), nested_diff(sol[0].b, sol[1].b));
    const double e2 = std::max(nested_diff(sol[1].u, sol[2].u), nested_diff(sol[1].b, sol[2].b));
    const double e3 = std::max(nested_diff(sol[2].u, sol[3].u), nested_diff(sol[2].b, sol[3].b));
    MESSAGE("h ratios " << e1 / e2 << " " << e2 / e3);
    CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("psi residual along a trajectory is second order in dt") {
    auto g = Grid::uniform(16, 513, 2 * pi, 12.0);
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
    MESSAGE("psi residual " << r1 << " " << r2 << " ratio " << r1 / r2);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("stability warning and blow-up detection") {
    auto g = Grid::stretched(32, 64, 2 * pi, 15.0, 3.0);
    SUBCASE("large dt warns") {
        Stepper st(g, {0.5, 1.0});
        (void)st.step(small_state(g, 0.05));
        CHECK(st.last_cfl() > 0.5);
        CHECK(st.history().cfl_warnings == 1);
    }
    SUBCASE("small dt does not") {
        Stepper st(g, {1e-3, 1.0});
        (void)st.step(small_state(g, 0.05));
        CHECK(st.history().cfl_warnings == 0);
    }
    SUBCASE("threshold") {
        Stepper st(g, {1e-3, 1.0, Scheme::ImexCN, 0.01});
        CHECK_THROWS_AS((void)st.step(small_state(g, 0.05)), BlowupDetected);
    }
    SUBCASE("explicit scheme past its limit") {
        Stepper st(g, {0.05, 10.0, Scheme::Explicit});
        PerturbationState s = small_state(g, 0.05);
        CHECK_THROWS_AS(
            for (int k = 0; k < 2000; ++k) s = st.step(s), BlowupDetected);
    }
    SUBCASE("invalid config") {
        CHECK_THROWS_AS(Stepper(g, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Stepper(g, {1e-3, 1.0, Scheme::ImexCN, -1.0}), std::invalid_argument);
        SolverConfig c;
        c.kappa = 2.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("determinism") {
    auto g = Grid::stretched(32, 96, 2 * pi, 15.0, 3.0);
    const PerturbationState s0 = small_state(g, 0.1);
    const PerturbationState a = run(g, {5e-3, 1.0}, s0, 50);
    const PerturbationState b = run(g, {5e-3, 1.0}, s0, 50);
    CHECK(a.u.identical(b.u));
    CHECK(a.b.identical(b.b));
    SolverConfig serial{5e-3, 1.0};
    serial.exec = Exec::Serial;
    const PerturbationState c = run(g, serial, s0, 50);
    CHECK(max_abs_diff(a.u, c.u) < 1e-12);
    CHECK(max_abs_diff(a.b, c.b) < 1e-12);
}

TEST_CASE("checkpoint restart is bitwise") {
    auto g = Grid::stretched(16, 64, 2 * pi, 15.0, 3.0);
    const auto dir = std::filesystem::temp_directory_path() / "mhdbl_test_ckpt";
    std::filesystem::create_directories(dir);
    for (ShearDatum datum : {ShearDatum::Erf, ShearDatum::Cutoff}) {
        CAPTURE(static_cast<int>(datum));
        const ShearProfile sh = datum == ShearDatum::Erf ? erf_shear(g, 0.0, 1.0) : cutoff_shear(g, 1.0);
        const PerturbationState s0 = small_state(g, 0.1, 1.0, 5, sh);
        const SolverConfig cfg{5e-3, 1.0};

        Stepper full(g, cfg);
        PerturbationState a = s0;
        for (int k = 0; k < 40; ++k) a = full.step(a);

        Stepper first(g, cfg);
        PerturbationState b = s0;
        for (int k = 0; k < 17; ++k) b = first.step(b);
        write_checkpoint(dir / "ck", b, first, {{"seed", 5}});
        Checkpoint cp = read_checkpoint(dir / "ck");
        CHECK(cp.meta.at("seed") == 5);
        CHECK(cp.state.t == b.t);
        CHECK(cp.history.steps == 17);
        Stepper second(g, cp.config);
        second.restore(cp.history);
        PerturbationState c = cp.state;
        for (int k = 17; k < 40; ++k) c = second.step(c);
        CHECK(c.u.identical(a.u));
        CHECK(c.b.identical(a.b));
        CHECK(c.t == a.t);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("transformed system") {
    SUBCASE("zero") {
        auto g = Grid::stretched(16, 64, 2 * pi, 15.0, 3.0);
        const auto s = make_state(Field(g), Field(g), erf_shear(g, 0.2, 1.0), 1.0);
        const Tendency r = rhs_transformed(to_tilde(s));
        CHECK(r.du.max_abs() == 0.0);
        CHECK(r.db.max_abs() == 0.0);
    }
    SUBCASE("chain rule consistency") {
        for (double b_bar : {1.0, 0.0}) {
            auto g = Grid::uniform(16, 2049, 2 * pi, 12.0);
            const PerturbationState s = small_state(g, 0.05, b_bar, 3, erf_shear(g, 0.5, 1.0));
            const Tendency direct = rhs_transformed(to_tilde(s));
            const Tendency chain = chain_rule_transform(s, rhs_primitive(s));
            const double err = std::max(max_abs_diff_rows(direct.du, chain.du, 3, g->ny() - 3),
                                        max_abs_diff_rows(direct.db, chain.db, 3, g->ny() - 3));
            MESSAGE("transformed consistency (b_bar = " << b_bar << ") " << err);
            CHECK(err <= 1e-8);
        }
    }
    SUBCASE("linear shear reduces to the primitive form") {
        auto g = Grid::stretched(16, 96, 2 * pi, 15.0, 3.0);
        const PerturbationState s = small_state(g, 0.1, 1.0, 3, linear_shear(g, 0.7));
        const TransformedState ts = to_tilde(s);
        const Tendency r = rhs_transformed(ts);
        const Field utx = ddx(ts.u_tilde), uty = ddy(ts.u_tilde, 1), bx = ddx(s.b), by = ddy(s.b, 1);
        Field du = ddy(ts.u_tilde, 2), db = ddy(s.b, 2);
        for (std::size_t i = 0; i < g->ny(); ++i) {
            for (std::size_t j = 0; j < g->nx(); ++j) {
                const double us = s.shear.values[i] + s.u(i, j);
                du(i, j) += -us * utx(i, j) - s.v(i, j) * uty(i, j) + (1.0 + s.b(i, j)) * bx(i, j) + s.g(i, j) * by(i, j);
                db(i, j) += (1.0 + s.b(i, j)) * utx(i, j) + s.g(i, j) * uty(i, j) - us * bx(i, j) - s.v(i, j) * by(i, j);
            }
        }
        CHECK(max_abs_diff(r.du, du) <= 1e-12);
        CHECK(max_abs_diff(r.db, db) <= 1e-12);
    }
}
