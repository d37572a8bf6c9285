#include "ctbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ctbf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ScenarioError("scenario field '" + field + "': " + what);
}

void expect_keys(const json& object, const std::string& scope,
                 const std::set<std::string>& known) {
    for (const auto& [key, value] : object.items())
        if (!known.count(key))
            fail(scope.empty() ? key : scope + "." + key, "unknown field");
}

template <typename T>
void read(const json& object, const std::string& scope, const std::string& key, T& out) {
    if (!object.contains(key))
        return;
    try {
        out = object.at(key).get<T>();
    } catch (const json::exception&) {
        fail(scope.empty() ? key : scope + "." + key, "wrong type");
    }
}

void parse_http(const json& node, HttpModelParams& http) {
    expect_keys(node, "traffic.http",
                {"enabled", "page_bytes_median", "page_bytes_sigma", "think_time_mean_s",
                 "objects_per_page"});
    read(node, "traffic.http", "enabled", http.enabled);
    read(node, "traffic.http", "page_bytes_median", http.page_bytes_median);
    read(node, "traffic.http", "page_bytes_sigma", http.page_bytes_sigma);
    read(node, "traffic.http", "think_time_mean_s", http.think_time_mean_s);
    read(node, "traffic.http", "objects_per_page", http.objects_per_page);
}

void parse_ftp(const json& node, FtpModelParams& ftp) {
    expect_keys(node, "traffic.ftp", {"enabled", "file_bytes", "gap_mean_s"});
    read(node, "traffic.ftp", "enabled", ftp.enabled);
    read(node, "traffic.ftp", "file_bytes", ftp.file_bytes);
    read(node, "traffic.ftp", "gap_mean_s", ftp.gap_mean_s);
}

void parse_video(const json& node, VideoModelParams& video) {
    expect_keys(node, "traffic.video",
                {"enabled", "mean_rate_bps", "fps", "playout_buffer_s", "session_duration_s",
                 "gap_mean_s", "frame_size_cv", "trace_file"});
    read(node, "traffic.video", "enabled", video.enabled);
    read(node, "traffic.video", "mean_rate_bps", video.mean_rate_bps);
    read(node, "traffic.video", "fps", video.fps);
    read(node, "traffic.video", "playout_buffer_s", video.playout_buffer_s);
    read(node, "traffic.video", "session_duration_s", video.session_duration_s);
    read(node, "traffic.video", "gap_mean_s", video.gap_mean_s);
    read(node, "traffic.video", "frame_size_cv", video.frame_size_cv);
    read(node, "traffic.video", "trace_file", video.trace_file);
}

void parse_ctbf(const json& node, DistributionPolicy& policy) {
    expect_keys(node, "ctbf",
                {"distribution", "cap_multiplier", "retention_fraction", "threshold_fraction"});
    if (node.contains("distribution")) {
        const std::string kind = node.at("distribution").get<std::string>();
        if (kind == "BALANCED")
            policy.kind = DistributionKind::Balanced;
        else if (kind == "DEFINED_CAP")
            policy.kind = DistributionKind::DefinedCap;
        else
            fail("ctbf.distribution", "must be BALANCED or DEFINED_CAP, got '" + kind + "'");
    }
    read(node, "ctbf", "cap_multiplier", policy.cap_multiplier);
    read(node, "ctbf", "retention_fraction", policy.retention_fraction);
    read(node, "ctbf", "threshold_fraction", policy.threshold_fraction);
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ScenarioError(std::string("scenario: invalid JSON: ") + err.what());
    }
    if (!root.is_object())
        throw ScenarioError("scenario: top level must be a JSON object");

    expect_keys(root, "",
                {"name", "line_rate_bps", "peak_rate_bps", "mtu_bytes", "duration_s", "warmup_s",
                 "seeds", "subscribers", "bucket_multiplier_bits_per_bps", "policies", "ctbf",
                 "traffic", "sweep"});

    Scenario s;
    read(root, "", "name", s.name);
    read(root, "", "line_rate_bps", s.line_rate_bps);
    read(root, "", "peak_rate_bps", s.peak_rate_bps);
    read(root, "", "mtu_bytes", s.mtu_bytes);
    read(root, "", "duration_s", s.duration_s);
    read(root, "", "warmup_s", s.warmup_s);
    read(root, "", "seeds", s.seeds);

    if (root.contains("subscribers")) {
        const json& node = root.at("subscribers");
        expect_keys(node, "subscribers", {"count", "assigned_rate_bps", "rates_bps"});
        read(node, "subscribers", "count", s.subscriber_count);
        read(node, "subscribers", "assigned_rate_bps", s.assigned_rate_bps);
        read(node, "subscribers", "rates_bps", s.rates_bps);
    }
    read(root, "", "bucket_multiplier_bits_per_bps", s.bucket_multiplier);

    if (root.contains("policies")) {
        std::vector<std::string> names;
        read(root, "", "policies", names);
        bool tbf = false, ctbf = false;
        for (const auto& n : names) {
            if (n == "TBF")
                tbf = true;
            else if (n == "CTBF")
                ctbf = true;
            else
                fail("policies", "must list TBF and/or CTBF, got '" + n + "'");
        }
        if (tbf && ctbf)
            s.policies = PolicySelection::Both;
        else if (tbf)
            s.policies = PolicySelection::TbfOnly;
        else if (ctbf)
            s.policies = PolicySelection::CtbfOnly;
        else
            fail("policies", "must not be empty");
    }

    if (root.contains("ctbf"))
        parse_ctbf(root.at("ctbf"), s.ctbf);

    if (root.contains("traffic")) {
        const json& node = root.at("traffic");
        expect_keys(node, "traffic", {"users_per_subscriber", "http", "ftp", "video"});
        read(node, "traffic", "users_per_subscriber", s.traffic.users_per_subscriber);
        if (node.contains("http"))
            parse_http(node.at("http"), s.traffic.http);
        if (node.contains("ftp"))
            parse_ftp(node.at("ftp"), s.traffic.ftp);
        if (node.contains("video"))
            parse_video(node.at("video"), s.traffic.video);
    }

    if (root.contains("sweep")) {
        const json& node = root.at("sweep");
        expect_keys(node, "sweep", {"axis", "values"});
        std::string axis;
        read(node, "sweep", "axis", axis);
        if (axis == "SUBSCRIBER_COUNT")
            s.sweep_axis = SweepAxis::SubscriberCount;
        else if (axis == "BUCKET_MULTIPLIER")
            s.sweep_axis = SweepAxis::BucketMultiplier;
        else
            fail("sweep.axis", "must be SUBSCRIBER_COUNT or BUCKET_MULTIPLIER, got '" + axis + "'");
        read(node, "sweep", "values", s.sweep_values);
    }

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("scenario: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

void validate_scenario(const Scenario& s) {
    if (s.line_rate_bps <= 0.0)
        fail("line_rate_bps", "must be positive");
    if (s.peak_rate_bps <= 0.0)
        fail("peak_rate_bps", "must be positive");
    if (s.peak_rate_bps > s.line_rate_bps)
        fail("peak_rate_bps", "must not exceed line_rate_bps");
    if (s.mtu_bytes == 0)
        fail("mtu_bytes", "must be positive");
    if (s.duration_s <= 0.0)
        fail("duration_s", "must be positive");
    if (s.warmup_s < 0.0 || s.warmup_s >= s.duration_s)
        fail("warmup_s", "must satisfy 0 <= warmup < duration");
    if (s.seeds.empty())
        fail("seeds", "must not be empty");

    if (s.rates_bps.empty()) {
        if (s.subscriber_count == 0)
            fail("subscribers.count", "must be positive");
        if (s.assigned_rate_bps <= 0.0)
            fail("subscribers.assigned_rate_bps", "must be positive");
    } else {
        for (double r : s.rates_bps)
            if (r <= 0.0)
                fail("subscribers.rates_bps", "rates must be positive");
    }
    if (s.bucket_multiplier <= 0.0)
        fail("bucket_multiplier_bits_per_bps", "must be positive");

    if (s.ctbf.cap_multiplier < 1.0)
        fail("ctbf.cap_multiplier", "must be >= 1");
    if (s.ctbf.retention_fraction < 0.0 || s.ctbf.retention_fraction > 1.0)
        fail("ctbf.retention_fraction", "must be in [0, 1]");
    if (s.ctbf.threshold_fraction <= 0.0 || s.ctbf.threshold_fraction > 1.0)
        fail("ctbf.threshold_fraction", "must be in (0, 1]");

    const auto& t = s.traffic;
    if (t.users_per_subscriber == 0)
        fail("traffic.users_per_subscriber", "must be positive");
    if (t.http.enabled) {
        if (t.http.page_bytes_median <= 0.0)
            fail("traffic.http.page_bytes_median", "must be positive");
        if (t.http.page_bytes_sigma < 0.0)
            fail("traffic.http.page_bytes_sigma", "must be non-negative");
        if (t.http.think_time_mean_s <= 0.0)
            fail("traffic.http.think_time_mean_s", "must be positive");
        if (t.http.objects_per_page == 0)
            fail("traffic.http.objects_per_page", "must be positive");
    }
    if (t.ftp.enabled) {
        if (t.ftp.file_bytes == 0)
            fail("traffic.ftp.file_bytes", "must be positive");
        if (t.ftp.gap_mean_s <= 0.0)
            fail("traffic.ftp.gap_mean_s", "must be positive");
    }
    if (t.video.enabled) {
        if (t.video.mean_rate_bps <= 0.0)
            fail("traffic.video.mean_rate_bps", "must be positive");
        if (t.video.fps <= 0.0)
            fail("traffic.video.fps", "must be positive");
        if (t.video.playout_buffer_s < 0.0)
            fail("traffic.video.playout_buffer_s", "must be non-negative");
        if (t.video.session_duration_s <= 0.0)
            fail("traffic.video.session_duration_s", "must be positive");
        if (t.video.gap_mean_s <= 0.0)
            fail("traffic.video.gap_mean_s", "must be positive");
        if (t.video.frame_size_cv < 0.0)
            fail("traffic.video.frame_size_cv", "must be non-negative");
    }

    if (s.sweep_axis != SweepAxis::None) {
        if (s.sweep_values.empty())
            fail("sweep.values", "must not be empty");
        if (s.sweep_axis == SweepAxis::SubscriberCount && !s.rates_bps.empty())
            fail("sweep.axis",
                 "SUBSCRIBER_COUNT sweeps require uniform rates, not an explicit rate list");
        for (double v : s.sweep_values) {
            if (v <= 0.0)
                fail("sweep.values", "values must be positive");
            if (s.sweep_axis == SweepAxis::SubscriberCount &&
                v != std::floor(v))
                fail("sweep.values", "subscriber counts must be integers");
        }
    }

    // Every sweep point must leave bucket capacities at or above the MTU, or
    // full-size packets could never conform.
    const double min_rate =
        s.rates_bps.empty()
            ? s.assigned_rate_bps
            : *std::min_element(s.rates_bps.begin(), s.rates_bps.end());
    double min_multiplier = s.bucket_multiplier;
    if (s.sweep_axis == SweepAxis::BucketMultiplier)
        for (double v : s.sweep_values)
            min_multiplier = std::min(min_multiplier, v);
    if (bucket_capacity_bytes(min_rate, min_multiplier) < static_cast<double>(s.mtu_bytes))
        fail("bucket_multiplier_bits_per_bps",
             "smallest bucket capacity falls below the MTU");
}

std::vector<SubscriberProfile> make_profiles(const Scenario& scenario, uint32_t subscriber_count,
                                             double bucket_multiplier) {
    std::vector<SubscriberProfile> profiles;
    if (!scenario.rates_bps.empty()) {
        profiles.reserve(scenario.rates_bps.size());
        for (size_t i = 0; i < scenario.rates_bps.size(); ++i)
            profiles.push_back({static_cast<SubscriberId>(i), scenario.rates_bps[i],
                                bucket_multiplier});
    } else {
        profiles.reserve(subscriber_count);
        for (uint32_t i = 0; i < subscriber_count; ++i)
            profiles.push_back({i, scenario.assigned_rate_bps, bucket_multiplier});
    }
    return profiles;
}

void apply_profile(Scenario& scenario, const std::string& profile_name) {
    if (profile_name == "desk") {
        scenario.duration_s = 900.0;
        scenario.warmup_s = 120.0;
        scenario.seeds = {1, 2, 3, 4, 5};
    } else if (profile_name == "paper") {
        scenario.duration_s = 10'800.0;
        scenario.warmup_s = 1'200.0;
    } else {
        throw ScenarioError("profile: must be 'desk' or 'paper', got '" + profile_name + "'");
    }
    validate_scenario(scenario);
}

} // namespace ctbf
