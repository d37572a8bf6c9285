#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ctbf/access_switch.hpp"
#include "ctbf/event_queue.hpp"
#include "ctbf/simulation.hpp"

using namespace ctbf;

namespace {

RunSettings desk_settings(ShapingMode mode, uint64_t seed = 1, uint32_t subscribers = 2) {
    RunSettings settings;
    settings.mode = mode;
    settings.seed = seed;
    for (uint32_t i = 0; i < subscribers; ++i)
        settings.profiles.push_back({i, 2e6, 8.0});
    settings.duration_s = 120.0;
    settings.warmup_s = 10.0;
    return settings;
}

bool same_departures(const std::vector<Departure>& a, const std::vector<Departure>& b) {
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].completed_at != b[i].completed_at || a[i].subscriber != b[i].subscriber ||
            a[i].length != b[i].length)
            return false;
    return true;
}

} // namespace

TEST_SUITE_BEGIN("simulation");

TEST_CASE("identical settings replay byte-identically") {
    RunSettings settings = desk_settings(ShapingMode::Ctbf, 3);
    settings.record_departures = true;
    const RunResult first = run_simulation(settings);
    const RunResult second = run_simulation(settings);

    CHECK(first.events_executed == second.events_executed);
    CHECK(same_departures(first.departures, second.departures));
    CHECK(first.report.aggregate.mean_ftp_throughput_bps ==
          second.report.aggregate.mean_ftp_throughput_bps);
    CHECK(first.report.aggregate.tokens_discarded == second.report.aggregate.tokens_discarded);
}

TEST_CASE("different seeds produce different workloads") {
    const RunResult a = run_simulation(desk_settings(ShapingMode::Tbf, 1));
    const RunResult b = run_simulation(desk_settings(ShapingMode::Tbf, 2));
    CHECK(a.report.aggregate.delivered_bytes != b.report.aggregate.delivered_bytes);
}

TEST_CASE("policies consume identical workload schedules under one seed") {
    RunSettings tbf = desk_settings(ShapingMode::Tbf, 7);
    tbf.record_draws = true;
    RunSettings ctbf = desk_settings(ShapingMode::Ctbf, 7);
    ctbf.record_draws = true;

    const RunResult a = run_simulation(tbf);
    const RunResult b = run_simulation(ctbf);
    REQUIRE(a.draws.per_subscriber.size() == b.draws.per_subscriber.size());
    for (size_t sub = 0; sub < a.draws.per_subscriber.size(); ++sub) {
        for (size_t kind = 0; kind < 3; ++kind) {
            const auto& draws_a = a.draws.per_subscriber[sub][kind];
            const auto& draws_b = b.draws.per_subscriber[sub][kind];
            const size_t common = std::min(draws_a.size(), draws_b.size());
            // closed-loop pacing may cut a run short, but never reorders or
            // changes the values that were drawn
            for (size_t i = 0; i < common; ++i)
                CHECK(draws_a[i] == draws_b[i]);
        }
    }
}

TEST_CASE("adding a subscriber does not perturb existing subscribers' draws") {
    RunSettings two = desk_settings(ShapingMode::Tbf, 5, 2);
    two.record_draws = true;
    RunSettings three = desk_settings(ShapingMode::Tbf, 5, 3);
    three.record_draws = true;

    const RunResult a = run_simulation(two);
    const RunResult b = run_simulation(three);
    for (size_t sub = 0; sub < 2; ++sub)
        for (size_t kind = 0; kind < 3; ++kind) {
            const auto& draws_a = a.draws.per_subscriber[sub][kind];
            const auto& draws_b = b.draws.per_subscriber[sub][kind];
            const size_t common = std::min(draws_a.size(), draws_b.size());
            for (size_t i = 0; i < common; ++i)
                CHECK(draws_a[i] == draws_b[i]);
        }
}

TEST_CASE("runs satisfy conservation, closure and the delivered-bits bound") {
    for (ShapingMode mode : {ShapingMode::Tbf, ShapingMode::Ctbf}) {
        const RunResult result = run_simulation(desk_settings(mode, 11, 4));
        CHECK(result.validation.conservation_ok);
        CHECK(result.validation.token_closure_ok);
        CHECK(result.validation.delivered_bound_ok);
        CHECK(result.validation.delivered_bits <= result.validation.delivered_bound_bits);
        if (mode == ShapingMode::Ctbf)
            CHECK(result.validation.rate_recomputations > 0);
    }
}

TEST_CASE("full retention makes sharing trace-identical to plain shaping") {
    RunSettings tbf = desk_settings(ShapingMode::Tbf, 13, 3);
    tbf.record_departures = true;
    RunSettings neutral = desk_settings(ShapingMode::Ctbf, 13, 3);
    neutral.record_departures = true;
    neutral.policy.retention_fraction = 1.0;

    const RunResult a = run_simulation(tbf);
    const RunResult b = run_simulation(neutral);
    CHECK(same_departures(a.departures, b.departures));
}

TEST_CASE("a lone bulk download empties the bucket then tracks the fill rate") {
    // closed form for a file F through a bucket of capacity C starting full,
    // fill r, peak = line: tokens limit the transfer to C + r/8 x t bytes, so
    // the whole file takes 8(F - C)/r seconds
    auto lone_download_bps = [](ShapingMode mode) {
        EventQueue events;
        MetricsCollector metrics(2, 0.0);
        SwitchConfig config;
        config.mode = mode;
        config.profiles = {{0, 2e6, 8.0}, {1, 2e6, 8.0}};
        AccessSwitch sw(config, events, metrics);
        sw.enable_departure_log(true);

        const uint64_t file_bytes = 5'000'000;
        uint64_t left = file_bytes;
        while (left > 0) {
            const uint32_t len = left > 1'500 ? 1'500 : static_cast<uint32_t>(left);
            sw.ingress(Packet{len, 0, FlowTag::Ftp, 0.0, 1});
            left -= len;
        }
        events.run_until(30.0);

        uint64_t delivered = 0;
        double last = 0.0;
        for (const Departure& d : sw.departures())
            if (d.subscriber == 0) {
                delivered += d.length;
                last = d.completed_at;
            }
        REQUIRE(delivered == file_bytes);
        return static_cast<double>(file_bytes) * 8.0 / last;
    };

    const double tbf_expected = 5e6 * 8.0 / (8.0 * (5e6 - 2e6) / 2e6);   // 10/3 Mbps
    const double tbf_measured = lone_download_bps(ShapingMode::Tbf);
    CHECK(tbf_measured == doctest::Approx(tbf_expected).epsilon(0.03));

    // with the neighbor idle and a cap of 2, the active fill rate becomes
    // 2 + 0.9 x 2 = 3.8 Mbps once the drain crosses the activity threshold
    const double ctbf_expected = 5e6 * 8.0 / (8.0 * (5e6 - 2e6) / 3.8e6);
    const double ctbf_measured = lone_download_bps(ShapingMode::Ctbf);
    CHECK(ctbf_measured == doctest::Approx(ctbf_expected).epsilon(0.03));
    CHECK(ctbf_measured > tbf_measured);
}

TEST_CASE("multi-user subscribers and multi-object pages stay well formed") {
    RunSettings settings = desk_settings(ShapingMode::Ctbf, 23, 2);
    settings.traffic.users_per_subscriber = 2;
    settings.traffic.http.objects_per_page = 4;
    const RunResult result = run_simulation(settings);
    CHECK(result.report.aggregate.delivered_bytes > 0);
    CHECK(result.validation.conservation_ok);
    CHECK(result.validation.token_closure_ok);
    CHECK(result.validation.delivered_bound_ok);

    // two users per subscriber offer roughly twice the load of one
    RunSettings single = desk_settings(ShapingMode::Ctbf, 23, 2);
    const RunResult one = run_simulation(single);
    CHECK(result.report.aggregate.delivered_bytes > one.report.aggregate.delivered_bytes);
}

TEST_CASE("sharing only ever helps the bulk transfers at desk scale") {
    RunSettings tbf = desk_settings(ShapingMode::Tbf, 17, 2);
    tbf.duration_s = 300.0;
    tbf.warmup_s = 30.0;
    RunSettings ctbf = tbf;
    ctbf.mode = ShapingMode::Ctbf;

    const RunResult a = run_simulation(tbf);
    const RunResult b = run_simulation(ctbf);
    REQUIRE(a.report.aggregate.ftp_sessions > 0);
    REQUIRE(b.report.aggregate.ftp_sessions > 0);
    CHECK(b.report.aggregate.mean_ftp_throughput_bps >
          a.report.aggregate.mean_ftp_throughput_bps);
}

TEST_SUITE_END();
