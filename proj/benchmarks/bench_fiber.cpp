#include <benchmark/benchmark.h>

#include "nonauto/layer.hpp"

using namespace nonauto;

static void BM_PullbackFiber(benchmark::State& state) {
    const auto p = canonical_forcing();
    const LayerField layer = riccati_layer(p, zero_gamma());
    const TorusPhase theta = TorusPhase::zeros(p.torus_dim());
    IntegratorConfig cfg;
    FiberParams params;
    params.seeds = {{-0.2}, {2.8}, 0.5};
    params.t_pull = static_cast<double>(state.range(0));
    const Vec x{0.0};
    for (auto _ : state) {
        const Fiber f = pullback_fiber(layer, theta, x, params, cfg);
        benchmark::DoNotOptimize(f.points.size());
    }
}
BENCHMARK(BM_PullbackFiber)->Arg(10)->Arg(40);

static void BM_InflatedFiber(benchmark::State& state) {
    const auto p = canonical_forcing();
    const LayerField layer = riccati_layer(p, zero_gamma());
    const TorusPhase theta = TorusPhase::zeros(p.torus_dim());
    IntegratorConfig cfg;
    FiberParams params;
    params.seeds = {{-0.2}, {2.8}, 0.5};
    params.t_pull = 10.0;
    NeighborhoodSpec spec;
    const Vec x{0.0};
    for (auto _ : state) {
        const Fiber f = inflated_fiber(layer, theta, x, 0.1, spec, params, cfg);
        benchmark::DoNotOptimize(f.points.size());
    }
}
BENCHMARK(BM_InflatedFiber);

BENCHMARK_MAIN();
