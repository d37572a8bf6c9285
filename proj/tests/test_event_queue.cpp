#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "ctbf/event_queue.hpp"

using namespace ctbf;

TEST_SUITE_BEGIN("sim-engine");

TEST_CASE("events fire in time order, equal times in scheduling order") {
    EventQueue events;
    std::vector<int> order;
    events.schedule(5.0, [&] { order.push_back(5); });
    events.schedule(3.0, [&] { order.push_back(31); });
    events.schedule(3.0, [&] { order.push_back(32); });
    CHECK(events.run_until(10.0) == 3);
    CHECK(order == std::vector<int>{31, 32, 5});
    CHECK(events.now() == 10.0);
}

TEST_CASE("cancelled events never execute") {
    EventQueue events;
    int fired = 0;
    const auto handle = events.schedule(1.0, [&] { ++fired; });
    events.schedule(2.0, [&] { ++fired; });
    events.cancel(handle);
    CHECK(events.run_until(5.0) == 1);
    CHECK(fired == 1);
}

TEST_CASE("scheduling in the past is fatal") {
    EventQueue events;
    events.schedule(1.0, [] {});
    events.run_until(2.0);
    CHECK_THROWS_AS(events.schedule(1.5, [] {}), std::logic_error);
    CHECK_NOTHROW(events.schedule(2.0, [] {}));   // the current instant is fine
}

TEST_CASE("handlers may schedule follow-up events") {
    EventQueue events;
    std::vector<double> fire_times;
    events.schedule(1.0, [&] {
        fire_times.push_back(events.now());
        events.schedule(events.now() + 0.5, [&] { fire_times.push_back(events.now()); });
    });
    CHECK(events.run_until(2.0) == 2);
    CHECK(fire_times == std::vector<double>{1.0, 1.5});
}

TEST_CASE("events beyond the horizon stay pending") {
    EventQueue events;
    int fired = 0;
    events.schedule(1.0, [&] { ++fired; });
    events.schedule(3.0, [&] { ++fired; });
    CHECK(events.run_until(2.0) == 1);
    CHECK(fired == 1);
    CHECK(events.run_until(4.0) == 1);
    CHECK(fired == 2);
}

TEST_CASE("identical schedules replay identically") {
    auto trace_of = [] {
        EventQueue events;
        std::vector<int> order;
        for (int i = 0; i < 50; ++i)
            events.schedule(static_cast<double>((i * 37) % 11), [&order, i] { order.push_back(i); });
        events.run_until(100.0);
        return order;
    };
    CHECK(trace_of() == trace_of());
}

TEST_SUITE_END();
