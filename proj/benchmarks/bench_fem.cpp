#include <benchmark/benchmark.h>

#include "tmx/fem.hpp"
#include "tmx/mesh.hpp"

static void BM_AssembleStiffness(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh((int)state.range(0));
    for (auto _ : state) {
        auto K = tmx::assemble_stiffness(mesh);
        benchmark::DoNotOptimize(K);
    }
    state.SetComplexityN(mesh.n_triangles());
}
BENCHMARK(BM_AssembleStiffness)->DenseRange(2, 5)->Complexity();

static void BM_DirichletSolve(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh((int)state.range(0));
    tmx::FemContext ctx(mesh);
    tmx::Field f(mesh, 2.0), g(mesh);
    for (auto _ : state) {
        auto w = ctx.solve_dirichlet(f, g);
        benchmark::DoNotOptimize(w);
    }
    state.SetComplexityN(mesh.n_vertices());
}
BENCHMARK(BM_DirichletSolve)->DenseRange(2, 5)->Complexity();

static void BM_Refine(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh((int)state.range(0));
    for (auto _ : state) {
        auto m = tmx::refine(mesh);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_Refine)->DenseRange(2, 4);
