#include <benchmark/benchmark.h>

#include <cmath>

#include "tmx/radial.hpp"

static void BM_ShootRadial(benchmark::State& state) {
    double gamma = (double)state.range(0);
    tmx::PerturbParams params;
    for (auto _ : state) {
        auto prof = tmx::shoot_radial(gamma, gamma * gamma * M_PI * M_E, params, 0.5);
        benchmark::DoNotOptimize(prof);
    }
}
BENCHMARK(BM_ShootRadial)->Arg(4)->Arg(8);

static void BM_S0Profile(benchmark::State& state) {
    double r = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tmx::s0_profile(r));
        r = r < 100.0 ? r * 1.1 : 0.1;
    }
}
BENCHMARK(BM_S0Profile);
