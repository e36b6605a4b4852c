#include "vemhr/runner.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace vemhr;

void BM_LocalStiffness(benchmark::State& state)
{
    const PolyMesh mesh = generate_mesh(MeshKind::poly_voronoi_cvt, 8, unit_square());
    const IsotropicMaterial mat = IsotropicMaterial::from_lame(1.0, 1.0);
    int cell = 0;
    for (auto _ : state) {
        LocalElement el(mesh, cell);
        benchmark::DoNotOptimize(el.stiffness(mat, Stabilization::diameter));
        cell = (cell + 1) % mesh.num_cells();
    }
}
BENCHMARK(BM_LocalStiffness);

void BM_Assemble(benchmark::State& state)
{
    const ProblemSpec p = problem_test_b();
    const PolyMesh mesh = generate_mesh(MeshKind::quad_structured, static_cast<int>(state.range(0)), p.domain);
    const IsotropicMaterial mats[] = {p.material};
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble(mesh, mats, p.load_case()));
    state.SetLabel(std::to_string(DofMap(mesh).size()) + " dofs");
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state)
{
    const ProblemSpec p = problem_test_b();
    const PolyMesh mesh = generate_mesh(MeshKind::quad_structured, static_cast<int>(state.range(0)), p.domain);
    const IsotropicMaterial mats[] = {p.material};
    const GlobalSystem sys = assemble(mesh, mats, p.load_case());
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(sys));
    state.SetLabel(std::to_string(sys.dofs.size()) + " dofs");
}
BENCHMARK(BM_Solve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MeshCvt(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_mesh(MeshKind::poly_voronoi_cvt, static_cast<int>(state.range(0)), unit_square()));
}
BENCHMARK(BM_MeshCvt)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
