#include <benchmark/benchmark.h>

#include "tmx/functional.hpp"
#include "tmx/maximizer.hpp"
#include "tmx/moser.hpp"

static void BM_Evaluate(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh((int)state.range(0));
    tmx::FemContext ctx(mesh);
    tmx::Field phi = tmx::build_test_function(ctx, std::exp(-8.0), {0.0, 0.0});
    tmx::PerturbParams params;
    params.lambda = 1.0;
    for (auto _ : state) {
        auto j = tmx::evaluate(mesh, phi, params);
        benchmark::DoNotOptimize(j);
    }
    state.SetComplexityN(mesh.n_triangles());
}
BENCHMARK(BM_Evaluate)->DenseRange(3, 5)->Complexity();

static void BM_RieszGradient(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh((int)state.range(0));
    tmx::FemContext ctx(mesh);
    tmx::Field phi = tmx::build_test_function(ctx, std::exp(-8.0), {0.0, 0.0});
    tmx::PerturbParams params;
    std::vector<double> warm;
    for (auto _ : state) {
        auto w = tmx::riesz_gradient(ctx, phi, params, &warm);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_RieszGradient)->DenseRange(3, 4);

static void BM_AscentIterations(benchmark::State& state) {
    tmx::Mesh mesh = tmx::build_disk_mesh(3);
    tmx::FemContext ctx(mesh);
    tmx::Field phi = tmx::build_test_function(ctx, std::exp(-8.0), {0.0, 0.0});
    tmx::PerturbParams params;
    tmx::MaximizeOptions opts;
    opts.max_iters = (int)state.range(0);
    opts.el_tol = 0.0;  // run the full budget
    for (auto _ : state) {
        auto r = tmx::maximize(ctx, params, phi, opts);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_AscentIterations)->Arg(10)->Arg(40);
