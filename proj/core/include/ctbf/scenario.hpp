#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctbf/access_switch.hpp"
#include "ctbf/traffic.hpp"

namespace ctbf {

/// Scenario files are rejected with messages naming the offending field.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PolicySelection : uint8_t { TbfOnly, CtbfOnly, Both };

enum class SweepAxis : uint8_t { None, SubscriberCount, BucketMultiplier };

/// One experiment description: switch and policy configuration, traffic
/// parameters, run horizon, seed list and an optional sweep axis.
struct Scenario {
    std::string name = "scenario";

    double line_rate_bps = 100e6;
    double peak_rate_bps = 100e6;
    uint32_t mtu_bytes = kDefaultMtuBytes;

    double duration_s = 10'800.0;
    double warmup_s = 1'200.0;
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

    uint32_t subscriber_count = 2;
    double assigned_rate_bps = 2e6;
    /// Optional explicit per-subscriber rates; overrides the uniform rate and
    /// subscriber_count when non-empty.
    std::vector<double> rates_bps;
    double bucket_multiplier = 8.0;   // bucket bits per bps

    PolicySelection policies = PolicySelection::Both;
    DistributionPolicy ctbf;
    TrafficParams traffic;

    SweepAxis sweep_axis = SweepAxis::None;
    std::vector<double> sweep_values;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Throws ScenarioError naming the first field that is out of range or
/// inconsistent.
void validate_scenario(const Scenario& scenario);

/// Profiles for one sweep point. Subscriber ids are dense slot indexes.
std::vector<SubscriberProfile> make_profiles(const Scenario& scenario, uint32_t subscriber_count,
                                             double bucket_multiplier);

/// desk: 900 s runs, 120 s warm-up, seeds 1..5. paper: 10800 s / 1200 s.
void apply_profile(Scenario& scenario, const std::string& profile_name);

} // namespace ctbf
