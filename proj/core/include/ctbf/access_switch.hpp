#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ctbf/controller.hpp"
#include "ctbf/event_queue.hpp"
#include "ctbf/metrics.hpp"
#include "ctbf/packet.hpp"
#include "ctbf/shaper.hpp"

namespace ctbf {

enum class ShapingMode : uint8_t { Tbf, Ctbf };
enum class SchedulerKind : uint8_t { RoundRobin };

struct SwitchConfig {
    double line_rate_bps = 100e6;
    double peak_rate_bps = 100e6;   // must not exceed the line rate
    uint32_t mtu_bytes = kDefaultMtuBytes;
    SchedulerKind scheduler = SchedulerKind::RoundRobin;
    ShapingMode mode = ShapingMode::Tbf;
    DistributionPolicy policy;      // used in Ctbf mode
    std::vector<SubscriberProfile> profiles;
};

/// One packet leaving the line.
struct Departure {
    double completed_at = 0.0;
    SubscriberId subscriber = 0;
    uint32_t length = 0;
};

/// The shared access link: egress classifier -> per-subscriber shaper ->
/// round-robin scheduler -> line. At most one dispatched packet per
/// subscriber stages between its shaper and the line (the backlog stays in
/// the shaper queue, where shaping decisions are made); the line serializes
/// one packet at a time.
///
/// Buckets start full. In Ctbf mode a controller re-evaluates activity after
/// every token-changing event; upward crossings of the activity threshold on
/// idle queues are caught by closed-form probe events.
class AccessSwitch {
public:
    AccessSwitch(const SwitchConfig& config, EventQueue& events, MetricsCollector& metrics);

    /// Invoked when a packet's last bit leaves the line.
    void set_delivery_callback(std::function<void(const Packet&, double)> callback);
    void enable_departure_log(bool on) { departure_log_on_ = on; }
    const std::vector<Departure>& departures() const { return departures_; }

    /// Classifier entry: enqueue to the owning shaper and attempt dispatch.
    void ingress(const Packet& packet);

    /// Round-robin choice among staged packets; nullopt when none are staged.
    std::optional<SubscriberId> scheduler_pick() const;

    /// Settle every rate bucket, flush the accruals into the metrics
    /// counters and export initial/final bucket levels. Call once at the end
    /// of a run.
    void settle_all(double now);

    size_t subscriber_count() const { return shapers_.size(); }
    const SubscriberShaper& shaper(size_t index) const { return shapers_[index]; }
    const SwitchConfig& config() const { return config_; }
    const CtbfController* controller() const {
        return controller_ ? &*controller_ : nullptr;
    }
    bool line_busy() const { return line_busy_; }
    double line_busy_until() const { return busy_until_; }

    /// Debug invariant: when the line is idle no packet is staged and no
    /// shaper holds a head packet that conforms to both buckets.
    bool work_conserving(double now) const;

private:
    struct SubMeta {
        std::optional<Packet> staged;
        EventQueue::Handle eligible_event = EventQueue::kNoHandle;
        double eligible_time = 0.0;
        EventQueue::Handle probe_event = EventQueue::kNoHandle;
        double initial_tokens = 0.0;
    };

    void pump(size_t index);
    void rearm_eligibility(size_t index);
    void rearm_threshold_probe(size_t index);
    void after_token_change(size_t index);
    void run_controller_refresh();
    void start_line_if_idle();
    void on_line_complete();
    std::optional<size_t> pick_index() const;

    SwitchConfig config_;
    EventQueue& events_;
    MetricsCollector& metrics_;

    std::vector<SubscriberShaper> shapers_;
    std::vector<SubMeta> subs_;
    std::optional<CtbfController> controller_;

    bool line_busy_ = false;
    double busy_until_ = 0.0;
    size_t serving_ = 0;
    size_t rr_cursor_ = 0;

    std::function<void(const Packet&, double)> delivery_callback_;
    bool departure_log_on_ = false;
    std::vector<Departure> departures_;
};

} // namespace ctbf
