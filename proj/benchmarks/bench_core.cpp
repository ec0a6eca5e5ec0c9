#include <benchmark/benchmark.h>

#include "hucai/dynamics.hpp"
#include "hucai/elliptic.hpp"
#include "hucai/heatpot.hpp"
#include "hucai/profiles.hpp"

using namespace hucai;

namespace {

Matrix2Field default_A(const Grid2D& g) { return conductivity(conductance_profile("sine", g, 1.0)).A; }

void BM_StencilApply(benchmark::State& state) {
    const Grid2D g = Grid2D::unit_square(static_cast<int>(state.range(0)));
    const Stencil9 op = anisotropic_stencil(default_A(g));
    const ScalarField x = source_profile("sine", g);
    ScalarField y(g);
    for (auto _ : state) {
        op.apply(x, y);
        benchmark::DoNotOptimize(y.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_StencilApply)->Arg(64)->Arg(128)->Arg(256);

void BM_PressureSolve(benchmark::State& state) {
    const Grid2D g = Grid2D::unit_square(static_cast<int>(state.range(0)));
    const LinearSystem sys = assemble_pressure_system(default_A(g), source_profile("bump", g, 120.0));
    int iters = 0;
    for (auto _ : state) {
        const PressureSolution sol = solve_pressure(sys);
        iters = sol.iterations;
        benchmark::DoNotOptimize(sol.p.values.data());
    }
    state.counters["cg_iters"] = iters;
}
BENCHMARK(BM_PressureSolve)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D g = Grid2D::unit_square(n);
    const ScalarField s = source_profile("bump", g, 120.0);
    State st;
    st.m = conductance_profile("bubble", g, 1.0);
    st.p = solve_p0(st.m, s).p0;
    const Params params;
    const double dt = 0.25 / n;
    for (auto _ : state) {
        const State next = step_conductance(st, s, params, dt);
        benchmark::DoNotOptimize(next.p.values.data());
    }
}
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HeatPotentialPoint(benchmark::State& state) {
    const HeatSource src = manufactured_duhamel_source(0.1, 1.0);
    HeatPotentialConfig cfg;
    for (auto _ : state) {
        const PotentialValue v = heat_potential_at(src, 0.5, 0.5, 0.2, cfg);
        benchmark::DoNotOptimize(v.u.x);
    }
}
BENCHMARK(BM_HeatPotentialPoint)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
