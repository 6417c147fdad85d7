#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "mhdbl/cancellation.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/initial.hpp"
#include "mhdbl/norms.hpp"

using namespace mhdbl;
using std::numbers::pi;

namespace {

// Composite Simpson on [0, b] with n (even) panels.
template <typename F>
double simpson(F&& f, double b, int n) {
    const double h = b / n;
    double acc = f(0.0) + f(b);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return acc * h / 3.0;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("mm coefficients") {
    CHECK(mm_coeff(0) == 1.0);
    CHECK(mm_coeff(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(mm_coeff(5) == doctest::Approx(std::sqrt(6.0) / 120.0).epsilon(1e-15));
    CHECK(std::abs(mm_coeff(5) - 0.0204124) < 1e-7);
    for (int m = 0; m < 100; ++m) {
        const double r = mm_coeff(m + 1) / mm_coeff(m);
        CHECK(rel(r, std::sqrt((m + 2.0) / (m + 1.0)) / (m + 1.0)) < 1e-14);
    }
    // the two evaluation paths meet smoothly at m = 20/21
    CHECK(rel(std::exp(log_mm_coeff(20)), mm_coeff(20)) < 1e-13);
    CHECK(std::isfinite(log_mm_coeff(200)));
    CHECK(mm_coeff(200) >= 0.0);
}

TEST_CASE("seminorms of trivial fields") {
    auto g = Grid::uniform(16, 129, 2 * pi, 12.0);
    const auto z = seminorms(Field(g), 0.5, 0.5, 0.0, 8);
    CHECK(z.total_x == 0.0);
    CHECK(z.total_d == 0.0);
    CHECK(z.total_y == 0.0);

    // x-independent data
    const Field f = Field::from_function(g, [](double, double y) { return y * std::exp(-y * y); });
    const auto nb = seminorms(f, 0.5, 0.5, 0.0, 8);
    CHECK(rel(nb.x[0], weighted_l2(f, GaussianWeight(0.5, 0.0))) < 1e-13);
    for (int m = 1; m <= 8; ++m) CHECK(nb.x[m] == 0.0);
    CHECK(nb.total_y == 0.0);
}

TEST_CASE("single-mode semi-norms match the separable assembly") {
    auto g = Grid::uniform(16, 1025, 2 * pi, 12.0);
    const double tau = 0.5, alpha = 0.5;
    const Field f = Field::from_function(g, [](double x, double y) { return std::sin(x) * std::exp(-y * y); });
    // m <= 8 keeps round-off in the empty bins (amplified by k^m) out of the way
    const auto nb = seminorms(f, tau, alpha, 0.0, 8);
    const GaussianWeight w(alpha, 0.0);
    std::vector<double> prof(g->ny()), dprof(g->ny());
    for (std::size_t i = 0; i < g->ny(); ++i) {
        const double y = g->y(i);
        prof[i] = std::exp(-y * y);
    }
    dprof = ddy_profile(*g, prof, 1);
    // ||sin||_{L^2(0, 2 pi)} = sqrt(pi)
    const double ly = weighted_l2_profile(*g, prof, w);
    const double ldy = weighted_l2_profile(*g, dprof, w);
    for (int m = 0; m <= 8; ++m) {
        const double c = std::pow(tau, m) * mm_coeff(m) * std::sqrt(pi);
        CHECK(rel(nb.x[m], c * ly) < 1e-10);
        CHECK(rel(nb.d[m], c * ldy) < 1e-10);
        if (m > 0) CHECK(rel(nb.y[m], m / tau * nb.x[m]) < 1e-15);
    }
    // and the continuum value int_0^inf e^{-7y^2/4} dy = sqrt(pi/7)
    CHECK(rel(ly, std::sqrt(std::sqrt(pi / 7.0))) < 1e-8);
}

TEST_CASE("spectral semi-norms agree with the direct path") {
    auto g = Grid::stretched(32, 192, 2 * pi, 15.0, 3.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Shapes s = random_shapes(g, {4, 0.5, seed});
        for (double t : {0.0, 2.0}) {
            const auto a = seminorms(s.u, 0.3, 0.4, t, 16);
            const auto b = seminorms_direct(s.u, 0.3, 0.4, t, 16);
            const auto c = seminorms(s.b, 0.3, 0.25, t, 16, Exec::Serial);
            const auto d = seminorms_direct(s.b, 0.3, 0.25, t, 16);
            // past ~1e-10 of the total the bins hold FFT round-off, which the
            // two paths produce differently
            for (int m = 0; m <= 16; ++m) {
                if (b.x[m] > 1e-10 * b.total_x) CHECK(rel(a.x[m], b.x[m]) < 1e-12);
                if (b.d[m] > 1e-10 * b.total_d) CHECK(rel(a.d[m], b.d[m]) < 1e-12);
                if (b.z[m] > 1e-10 * b.total_z) CHECK(rel(a.z[m], b.z[m]) < 1e-12);
                if (d.x[m] > 1e-10 * d.total_x) CHECK(rel(c.x[m], d.x[m]) < 1e-12);
            }
            CHECK(rel(a.total_x, b.total_x) < 1e-12);
            CHECK(rel(a.total_y, b.total_y) < 1e-12);
        }
    }
}

TEST_CASE("bundle invariants") {
    auto g = Grid::stretched(32, 160, 2 * pi, 15.0, 3.0);
    const Shapes s = random_shapes(g, {5, 0.5, 7});
    double prev = 0.0;
    std::vector<double> prev_x;
    for (double tau : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto nb = seminorms(s.u, tau, 0.5, 0.0, 16);
        CHECK(nb.total_x >= prev);
        if (!prev_x.empty()) {
            for (int m = 0; m <= 16; ++m) CHECK(nb.x[m] >= prev_x[m]);
        }
        prev = nb.total_x;
        prev_x = nb.x;
        double sy = 0.0;
        for (int m = 1; m <= 16; ++m) {
            CHECK(nb.y[m] == (m / tau) * nb.x[m]);
            sy += nb.y[m];
        }
        CHECK(rel(nb.total_y, sy) < 1e-14);
    }
}

TEST_CASE("overflow guard and truncation warning") {
    auto g = Grid::uniform(32, 129, 2 * pi, 12.0);
    const Field f = Field::from_function(g, [](double x, double y) { return std::cos(15 * x) * std::exp(-y * y); });
    CHECK_THROWS_AS(seminorms(f, 1e30, 0.5, 0.0, 16), OverflowAtM);
    CHECK(seminorms(f, 1.0, 0.5, 0.0, 16).truncation_warning);
    const Field smooth = Field::from_function(g, [](double x, double y) { return std::cos(x) * std::exp(-y * y); });
    CHECK_FALSE(seminorms(smooth, 0.1, 0.5, 0.0, 16).truncation_warning);
}

TEST_CASE("poincare ratio") {
    SUBCASE("zero field") {
        auto g = Grid::uniform(8, 65, 2 * pi, 10.0);
        CHECK(poincare_check(Field(g), 0.5, 0.0, 0) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("y exp(-y^2) against a fine 1-D quadrature") {
        auto g = Grid::uniform(8, 2049, 2 * pi, 12.0);
        const Field f = Field::from_function(g, [](double x, double y) { return std::cos(x) * y * std::exp(-y * y); });
        const double alpha = 0.25;
        auto th2 = [&](double y) { return std::exp(alpha * y * y / 2.0); };
        const double num = simpson(
            [&](double y) {
                const double d = (1.0 - 2.0 * y * y) * std::exp(-y * y);
                return th2(y) * d * d;
            },
            12.0, 20000);
        const double den = simpson(
            [&](double y) {
                const double v = y * std::exp(-y * y);
                return th2(y) * v * v;
            },
            12.0, 20000);
        const double oracle = num / (alpha * den);
        const double r0 = poincare_check(f, alpha, 0.0, 0);
        const double r3 = poincare_check(f, alpha, 0.0, 3);
        CHECK(r0 >= 1.0);
        CHECK(rel(r0, oracle) < 1e-8);
        CHECK(rel(r3, oracle) < 1e-8);
    }
    SUBCASE("extremal profile sits at ratio one") {
        for (double alpha : {0.25, 0.5}) {
            for (double t : {0.0, 1.0, 10.0}) {
                const double tb = 1.0 + t;
                auto g = Grid::uniform(8, 2049, 2 * pi, 14.0 * std::sqrt(tb / alpha));
                const Field f = Field::from_function(g, [&](double x, double y) {
                    return std::cos(x) * std::exp(-alpha * y * y / (2.0 * tb));
                });
                const double r = poincare_check(f, alpha, t, 1);
                MESSAGE("alpha " << alpha << " t " << t << " ratio - 1 = " << r - 1.0);
                CHECK(r >= 1.0 - 1e-8);
                CHECK(r <= 1.0 + 1e-6);
            }
        }
    }
}

TEST_CASE("dissipation predicate") {
    auto g = Grid::stretched(32, 256, 2 * pi, 15.0, 2.0);
    const auto zero = dissipation_check(Field(g), 0.5, 0.5, 0.0, 0.25);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    const Shapes s = random_shapes(g, {4, 0.5, 3});
    for (double beta : {0.1, 0.25, 0.4}) {
        const auto r = dissipation_check(s.u, 0.3, 0.5, 1.0, beta);
        CHECK(r.lhs >= r.rhs);
        const auto rb = dissipation_check(s.b, 0.3, 0.25, 0.0, beta);
        CHECK(rb.lhs >= rb.rhs);
    }
    // beta -> 0 reduces to the summed Poincare bound
    const double alpha = 0.4, t = 1.0, tau = 0.3;
    const auto r = dissipation_check(s.u, tau, alpha, t, 1e-14);
    const auto nb = seminorms(s.u, tau, alpha, t, 16);
    CHECK(rel(r.rhs, alpha / (1.0 + t) * nb.total_x) < 1e-10);
    CHECK_THROWS_AS(dissipation_check(s.u, tau, alpha, t, 0.6), std::invalid_argument);
}

TEST_CASE("monitor on a zero trajectory") {
    auto g = Grid::uniform(16, 65, 2 * pi, 12.0);
    std::vector<TransformedState> traj;
    std::vector<double> taus;
    for (int k = 0; k < 4; ++k) {
        const double t = 0.1 * k;
        traj.push_back(to_tilde(make_state(Field(g), Field(g), erf_shear(g, t, 1.0), 1.0)));
        taus.push_back(0.5);
    }
    const auto rep = apriori_monitor(traj, taus, 0.5, 1.0);
    REQUIRE(rep.samples.size() == 4);
    for (const auto& s : rep.samples) {
        CHECK(s.xu == 0.0);
        CHECK(s.su == 0.0);
        CHECK(s.nonlinear == 0.0);
        CHECK(s.c0_u == 0.0);
    }
    CHECK(rep.c0_hat == 0.0);
}

TEST_CASE("csv outputs") {
    auto g = Grid::uniform(16, 65, 2 * pi, 12.0);
    const Shapes s = random_shapes(g, {2, 0.5, 1});
    const auto nb = seminorms(s.u, 0.2, 0.5, 0.0, 4);
    const auto path = std::filesystem::temp_directory_path() / "mhdbl_norms.csv";
    write_norms_csv(path, nb);
    std::ifstream is(path);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line == "t,tau,alpha,m,X_m,D_m,Z_m,Y_m");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6);
    std::filesystem::remove(path);
}
