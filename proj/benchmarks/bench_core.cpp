#include <benchmark/benchmark.h>

#include "ctbf/controller.hpp"
#include "ctbf/event_queue.hpp"
#include "ctbf/token_bucket.hpp"

using namespace ctbf;

static void BM_TokenBucketSettleConsume(benchmark::State& state) {
    TokenBucket bucket(2'000'000.0, 2e6, 2'000'000.0, 0.0);
    double now = 0.0;
    for (auto _ : state) {
        now += 0.006;
        benchmark::DoNotOptimize(bucket.settle(now));
        if (bucket.conforms_at(now, 1'500))
            bucket.consume(now, 1'500);
    }
}
BENCHMARK(BM_TokenBucketSettleConsume);

static void BM_EventQueueChurn(benchmark::State& state) {
    EventQueue events;
    double horizon = 0.0;
    for (auto _ : state) {
        horizon += 1.0;
        for (int i = 0; i < 64; ++i)
            events.schedule(horizon - 0.5 + i * 0.001, [] {});
        events.run_until(horizon);
    }
    state.SetItemsProcessed(static_cast<int64_t>(events.executed()));
}
BENCHMARK(BM_EventQueueChurn);

static void BM_DefinedCapDistribution(benchmark::State& state) {
    const auto n = static_cast<uint32_t>(state.range(0));
    std::vector<SubscriberProfile> profiles;
    std::vector<Activity> states;
    for (uint32_t i = 0; i < n; ++i) {
        profiles.push_back({i, 2e6 + 1e5 * (i % 7), 8.0});
        states.push_back(i % 3 == 0 ? Activity::Inactive : Activity::Active);
    }
    DistributionPolicy policy;
    policy.kind = DistributionKind::DefinedCap;
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_outcome(profiles, states, policy));
}
BENCHMARK(BM_DefinedCapDistribution)->Arg(10)->Arg(50);

BENCHMARK_MAIN();
