#pragma once

#include <cstdint>
#include <vector>

#include "ctbf/packet.hpp"

namespace ctbf {

/// Summary statistics for one aggregation scope (a subscriber, or everyone).
/// Means are NaN when the scope has no samples; CSV export leaves such cells
/// empty.
struct MetricsSummary {
    uint64_t http_samples = 0;
    double mean_http_delay_s = 0.0;
    double stdev_http_delay_s = 0.0;

    uint64_t ftp_sessions = 0;
    double mean_ftp_throughput_bps = 0.0;
    double stdev_ftp_throughput_bps = 0.0;

    uint64_t frames_considered = 0;
    uint64_t frames_decodable = 0;
    double decodable_frame_rate = 0.0;

    // Token accounting, over the whole run (not warm-up filtered, so the
    // closure identity generated + initial = consumed + discarded + final
    // stays exact).
    double tokens_generated = 0.0;
    double tokens_discarded = 0.0;
    double sharing_efficiency = 1.0;   // 1 - discarded/generated
    uint64_t consumed_bytes = 0;       // drained from rate buckets at dispatch
    uint64_t consumed_packets = 0;
    uint64_t delivered_bytes = 0;      // serialized onto the line
    double initial_tokens = 0.0;
    double final_tokens = 0.0;
};

struct MetricsReport {
    double warmup_cutoff_s = 0.0;
    std::vector<MetricsSummary> per_subscriber;
    MetricsSummary aggregate;
};

/// Warm-up-aware sample accumulator. A QoE sample belongs to the measurement
/// window iff its completion time (the frame deadline, for video) is at or
/// after the warm-up cutoff. summarize() reduces over a canonical sample
/// order, so reports do not depend on recording order.
class MetricsCollector {
public:
    MetricsCollector(size_t subscriber_count, double warmup_cutoff_s);

    double warmup_cutoff() const { return warmup_cutoff_; }
    size_t subscriber_count() const { return per_sub_.size(); }

    void record_http(SubscriberId sub, double request_at, double completed_at);
    void record_ftp(SubscriberId sub, double start_at, double end_at, uint64_t bytes);
    /// `arrived_at` may be +infinity for a frame that never completed.
    void record_frame(SubscriberId sub, double deadline, double arrived_at);
    void record_tokens(SubscriberId sub, double generated, double discarded);
    void record_consumed(SubscriberId sub, uint32_t bytes);
    void record_delivered(SubscriberId sub, uint32_t bytes);
    void set_bucket_levels(SubscriberId sub, double initial_tokens, double final_tokens);

    MetricsReport summarize() const;

private:
    struct TimedSample {
        double at;      // completion time / deadline
        double value;   // delay, throughput, or decodable flag
    };
    struct PerSubscriber {
        std::vector<TimedSample> http;     // value = delay seconds
        std::vector<TimedSample> ftp;      // value = session throughput bps
        std::vector<TimedSample> frames;   // value = 1.0 decodable, 0.0 not
        double tokens_generated = 0.0;
        double tokens_discarded = 0.0;
        uint64_t consumed_bytes = 0;
        uint64_t consumed_packets = 0;
        uint64_t delivered_bytes = 0;
        double initial_tokens = 0.0;
        double final_tokens = 0.0;
    };

    PerSubscriber& at(SubscriberId sub);

    double warmup_cutoff_;
    std::vector<PerSubscriber> per_sub_;
};

} // namespace ctbf
