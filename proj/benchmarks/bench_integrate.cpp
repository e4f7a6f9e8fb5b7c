#include <benchmark/benchmark.h>

#include "nonauto/hull.hpp"
#include "nonauto/layer.hpp"

using namespace nonauto;

static void BM_Rk4LayerSteps(benchmark::State& state) {
    const auto p = canonical_forcing();
    const LayerField layer = riccati_layer(p, zero_gamma());
    const VectorField f = frozen_field(layer, {0.0}, TorusPhase::zeros(p.torus_dim()));
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    const Vec y0{2.0};
    const double horizon = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto r = integrate_endpoint(f, y0, 0.0, horizon, cfg);
        benchmark::DoNotOptimize(r.y[0]);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(horizon / cfg.step));
}
BENCHMARK(BM_Rk4LayerSteps)->Arg(100)->Arg(1000);

static void BM_Rk45LayerSteps(benchmark::State& state) {
    const auto p = canonical_forcing();
    const LayerField layer = riccati_layer(p, zero_gamma());
    const VectorField f = frozen_field(layer, {0.0}, TorusPhase::zeros(p.torus_dim()));
    IntegratorConfig cfg;
    cfg.method = Method::Rk45;
    cfg.abs_tol = 1e-8;
    cfg.rel_tol = 1e-8;
    const Vec y0{2.0};
    for (auto _ : state) {
        auto r = integrate_endpoint(f, y0, 0.0, 100.0, cfg);
        benchmark::DoNotOptimize(r.y[0]);
    }
}
BENCHMARK(BM_Rk45LayerSteps);

BENCHMARK_MAIN();
