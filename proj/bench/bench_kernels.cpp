// Serial reference vs OpenMP kernels. Each benchmark takes the execution
// policy as its first argument (0 serial, 1 parallel) and the grid size as
// the second (nx = ny / 4).

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "mhdbl/initial.hpp"
#include "mhdbl/kernels.hpp"
#include "mhdbl/operators.hpp"
#include "mhdbl/solver.hpp"

using namespace mhdbl;

namespace {

Exec policy(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

GridPtr grid(const benchmark::State& s) {
    const auto ny = static_cast<std::size_t>(s.range(1));
    return Grid::stretched(ny / 4, ny, 2.0 * std::numbers::pi, 15.0, 3.0);
}

Field noise(const GridPtr& g, std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Field f(g);
    for (std::size_t i = 0; i < g->ny(); ++i)
        for (std::size_t j = 0; j < g->nx(); ++j) f(i, j) = n(rng);
    return f;
}

void label(benchmark::State& s) {
    s.SetLabel(s.range(0) == 0 ? "serial" : "parallel");
    s.SetItemsProcessed(s.iterations() * s.range(1) * (s.range(1) / 4));
}

void BM_ddy(benchmark::State& s) {
    const GridPtr g = grid(s);
    const Field f = noise(g);
    for (auto _ : s) benchmark::DoNotOptimize(ddy(f, 2, policy(s)));
    label(s);
}

void BM_cumint(benchmark::State& s) {
    const GridPtr g = grid(s);
    const Field f = noise(g);
    for (auto _ : s) benchmark::DoNotOptimize(cumint_y(f, policy(s)));
    label(s);
}

void BM_ddx(benchmark::State& s) {
    const GridPtr g = grid(s);
    const Field f = noise(g);
    for (auto _ : s) benchmark::DoNotOptimize(ddx(f, policy(s)));
    label(s);
}

// O(nx^2) DFT used as the oracle for ddx; serial only.
void BM_ddx_direct(benchmark::State& s) {
    const GridPtr g = grid(s);
    const Field f = noise(g);
    Field out(g);
    for (auto _ : s) {
        kernels::ddx_direct(*g, f.data(), out.data());
        benchmark::DoNotOptimize(out.data());
    }
    label(s);
}

void BM_rfft(benchmark::State& s) {
    const GridPtr g = grid(s);
    const Field f = noise(g);
    for (auto _ : s) benchmark::DoNotOptimize(rfft_rows(f, policy(s)));
    label(s);
}

void BM_banded_solve(benchmark::State& s) {
    const GridPtr g = grid(s);
    const std::size_t n = g->ny(), cols = g->nx();
    kernels::BandedLU lu(n, 4, 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i >= 4 ? i - 4 : 0); j <= std::min(n - 1, i + 4); ++j)
            lu.set(i, j, i == j ? 10.0 : 1.0 / (1.0 + static_cast<double>(i > j ? i - j : j - i)));
    lu.factor();
    const Field rhs = noise(g);
    std::vector<double> work(rhs.data(), rhs.data() + n * cols);
    for (auto _ : s) {
        s.PauseTiming();
        std::copy(rhs.data(), rhs.data() + n * cols, work.begin());
        s.ResumeTiming();
        lu.solve(work.data(), cols, policy(s));
        benchmark::DoNotOptimize(work.data());
    }
    label(s);
}

void BM_explicit_terms(benchmark::State& s) {
    const GridPtr g = grid(s);
    Shapes sh = random_shapes(g, {3, 0.5, 1});
    sh.u *= 0.1;
    sh.b *= 0.1;
    const PerturbationState st = make_state(sh.u, sh.b, erf_shear(g, 0.0, 1.0), 1.0);
    for (auto _ : s) benchmark::DoNotOptimize(explicit_terms(st, policy(s)));
    label(s);
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int exec : {0, 1})
        for (int ny : {128, 256, 512}) b->Args({exec, ny});
}

}  // namespace

BENCHMARK(BM_ddy)->Apply(sizes);
BENCHMARK(BM_cumint)->Apply(sizes);
BENCHMARK(BM_ddx)->Apply(sizes);
BENCHMARK(BM_ddx_direct)->Args({0, 128})->Args({0, 256})->Args({0, 512});
BENCHMARK(BM_rfft)->Apply(sizes);
BENCHMARK(BM_banded_solve)->Apply(sizes);
BENCHMARK(BM_explicit_terms)->Apply(sizes);

BENCHMARK_MAIN();
