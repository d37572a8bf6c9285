#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ctbf/access_switch.hpp"
#include "ctbf/metrics.hpp"
#include "ctbf/traffic.hpp"

namespace ctbf {

/// One fully resolved simulation point: a single (policy, seed) run.
struct RunSettings {
    double line_rate_bps = 100e6;
    double peak_rate_bps = 100e6;
    uint32_t mtu_bytes = kDefaultMtuBytes;
    std::vector<SubscriberProfile> profiles;
    ShapingMode mode = ShapingMode::Tbf;
    DistributionPolicy policy;
    TrafficParams traffic;
    double duration_s = 900.0;
    double warmup_s = 120.0;
    uint64_t seed = 1;

    bool record_departures = false;   // per-packet line-exit log (memory heavy)
    bool record_draws = false;        // per-(subscriber, model) drawn values
};

/// Post-run self checks; a violation makes the CLI exit non-zero.
struct ValidationReport {
    uint64_t rate_recomputations = 0;
    double max_conservation_rel_error = 0.0;   // over all recomputation points
    bool conservation_ok = true;

    double delivered_bits = 0.0;
    double delivered_bound_bits = 0.0;   // sum assigned x duration + initial tokens + one MTU each
    bool delivered_bound_ok = true;

    double max_token_closure_error_bytes = 0.0;   // per-subscriber closure residual
    bool token_closure_ok = true;

    bool ok() const { return conservation_ok && delivered_bound_ok && token_closure_ok; }
};

/// Values drawn by the traffic models, in draw order, per subscriber and
/// model. Filled only when RunSettings::record_draws is set.
struct WorkloadDraws {
    std::vector<std::array<std::vector<double>, 3>> per_subscriber;
};

struct RunResult {
    MetricsReport report;
    uint64_t events_executed = 0;
    std::vector<Departure> departures;
    WorkloadDraws draws;
    ValidationReport validation;
};

RunResult run_simulation(const RunSettings& settings);

} // namespace ctbf
