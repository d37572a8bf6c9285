#include "ctbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctbf {

MetricsCollector::MetricsCollector(size_t subscriber_count, double warmup_cutoff_s)
    : warmup_cutoff_(warmup_cutoff_s), per_sub_(subscriber_count) {}

MetricsCollector::PerSubscriber& MetricsCollector::at(SubscriberId sub) {
    if (sub >= per_sub_.size())
        throw std::logic_error("metrics: unknown subscriber");
    return per_sub_[sub];
}

void MetricsCollector::record_http(SubscriberId sub, double request_at, double completed_at) {
    if (completed_at < request_at)
        throw std::logic_error("metrics: negative http duration");
    at(sub).http.push_back({completed_at, completed_at - request_at});
}

void MetricsCollector::record_ftp(SubscriberId sub, double start_at, double end_at,
                                  uint64_t bytes) {
    if (end_at <= start_at)
        throw std::logic_error("metrics: non-positive ftp session duration");
    const double bps = static_cast<double>(bytes) * 8.0 / (end_at - start_at);
    at(sub).ftp.push_back({end_at, bps});
}

void MetricsCollector::record_frame(SubscriberId sub, double deadline, double arrived_at) {
    at(sub).frames.push_back({deadline, arrived_at <= deadline ? 1.0 : 0.0});
}

void MetricsCollector::record_tokens(SubscriberId sub, double generated, double discarded) {
    auto& s = at(sub);
    s.tokens_generated += generated;
    s.tokens_discarded += discarded;
}

void MetricsCollector::record_consumed(SubscriberId sub, uint32_t bytes) {
    auto& s = at(sub);
    s.consumed_bytes += bytes;
    ++s.consumed_packets;
}

void MetricsCollector::record_delivered(SubscriberId sub, uint32_t bytes) {
    at(sub).delivered_bytes += bytes;
}

void MetricsCollector::set_bucket_levels(SubscriberId sub, double initial_tokens,
                                         double final_tokens) {
    auto& s = at(sub);
    s.initial_tokens = initial_tokens;
    s.final_tokens = final_tokens;
}

namespace {

struct Moments {
    uint64_t n = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stdev = std::numeric_limits<double>::quiet_NaN();
};

// Reduce over a canonical (time, value) order so the result is independent
// of recording order.
Moments reduce(std::vector<std::pair<double, double>>& samples) {
    std::sort(samples.begin(), samples.end());
    Moments m;
    m.n = samples.size();
    if (m.n == 0)
        return m;
    m.stdev = 0.0;
    double sum = 0.0;
    for (const auto& [at, v] : samples)
        sum += v;
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (const auto& [at, v] : samples)
            ss += (v - m.mean) * (v - m.mean);
        m.stdev = std::sqrt(ss / static_cast<double>(m.n - 1));
    }
    return m;
}

} // namespace

MetricsReport MetricsCollector::summarize() const {
    MetricsReport report;
    report.warmup_cutoff_s = warmup_cutoff_;
    report.per_subscriber.resize(per_sub_.size());

    std::vector<std::pair<double, double>> all_http, all_ftp, all_frames;

    for (size_t i = 0; i < per_sub_.size(); ++i) {
        const auto& src = per_sub_[i];
        MetricsSummary& out = report.per_subscriber[i];

        std::vector<std::pair<double, double>> http, ftp, frames;
        for (const auto& s : src.http)
            if (s.at >= warmup_cutoff_) {
                http.emplace_back(s.at, s.value);
                all_http.emplace_back(s.at, s.value);
            }
        for (const auto& s : src.ftp)
            if (s.at >= warmup_cutoff_) {
                ftp.emplace_back(s.at, s.value);
                all_ftp.emplace_back(s.at, s.value);
            }
        for (const auto& s : src.frames)
            if (s.at >= warmup_cutoff_) {
                frames.emplace_back(s.at, s.value);
                all_frames.emplace_back(s.at, s.value);
            }

        const Moments http_m = reduce(http);
        out.http_samples = http_m.n;
        out.mean_http_delay_s = http_m.mean;
        out.stdev_http_delay_s = http_m.stdev;

        const Moments ftp_m = reduce(ftp);
        out.ftp_sessions = ftp_m.n;
        out.mean_ftp_throughput_bps = ftp_m.mean;
        out.stdev_ftp_throughput_bps = ftp_m.stdev;

        out.frames_considered = frames.size();
        uint64_t decodable = 0;
        for (const auto& [at, v] : frames)
            decodable += v > 0.5 ? 1 : 0;
        out.frames_decodable = decodable;
        out.decodable_frame_rate =
            frames.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(decodable) / static_cast<double>(frames.size());

        out.tokens_generated = src.tokens_generated;
        out.tokens_discarded = src.tokens_discarded;
        out.sharing_efficiency =
            src.tokens_generated > 0.0 ? 1.0 - src.tokens_discarded / src.tokens_generated : 1.0;
        out.consumed_bytes = src.consumed_bytes;
        out.consumed_packets = src.consumed_packets;
        out.delivered_bytes = src.delivered_bytes;
        out.initial_tokens = src.initial_tokens;
        out.final_tokens = src.final_tokens;
    }

    MetricsSummary& agg = report.aggregate;
    const Moments http_m = reduce(all_http);
    agg.http_samples = http_m.n;
    agg.mean_http_delay_s = http_m.mean;
    agg.stdev_http_delay_s = http_m.stdev;

    const Moments ftp_m = reduce(all_ftp);
    agg.ftp_sessions = ftp_m.n;
    agg.mean_ftp_throughput_bps = ftp_m.mean;
    agg.stdev_ftp_throughput_bps = ftp_m.stdev;

    agg.frames_considered = all_frames.size();
    uint64_t decodable = 0;
    for (const auto& [at, v] : all_frames)
        decodable += v > 0.5 ? 1 : 0;
    agg.frames_decodable = decodable;
    agg.decodable_frame_rate = all_frames.empty()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : static_cast<double>(decodable) /
                                         static_cast<double>(all_frames.size());

    for (const auto& sub : report.per_subscriber) {
        agg.tokens_generated += sub.tokens_generated;
        agg.tokens_discarded += sub.tokens_discarded;
        agg.consumed_bytes += sub.consumed_bytes;
        agg.consumed_packets += sub.consumed_packets;
        agg.delivered_bytes += sub.delivered_bytes;
        agg.initial_tokens += sub.initial_tokens;
        agg.final_tokens += sub.final_tokens;
    }
    agg.sharing_efficiency =
        agg.tokens_generated > 0.0 ? 1.0 - agg.tokens_discarded / agg.tokens_generated : 1.0;

    return report;
}

} // namespace ctbf
