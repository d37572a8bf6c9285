#include <benchmark/benchmark.h>

#include "ctbf/simulation.hpp"

using namespace ctbf;

// End-to-end event throughput on a small shared link.
static void BM_Simulation(benchmark::State& state) {
    RunSettings settings;
    const auto n = static_cast<uint32_t>(state.range(0));
    for (uint32_t i = 0; i < n; ++i)
        settings.profiles.push_back({i, 2e6, 8.0});
    settings.mode = state.range(1) != 0 ? ShapingMode::Ctbf : ShapingMode::Tbf;
    settings.duration_s = 30.0;
    settings.warmup_s = 0.0;
    settings.seed = 1;

    uint64_t events = 0;
    for (auto _ : state) {
        const RunResult result = run_simulation(settings);
        events += result.events_executed;
        benchmark::DoNotOptimize(result.report.aggregate.delivered_bytes);
    }
    state.SetItemsProcessed(static_cast<int64_t>(events));
    state.SetLabel(settings.mode == ShapingMode::Ctbf ? "ctbf" : "tbf");
}
BENCHMARK(BM_Simulation)->Args({5, 0})->Args({5, 1})->Args({20, 1});

BENCHMARK_MAIN();
