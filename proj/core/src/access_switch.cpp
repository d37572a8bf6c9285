#include "ctbf/access_switch.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctbf {

namespace {
// Probe events land just past the closed-form crossing instant so the level
// computed there is on the inactive side of the threshold despite rounding.
constexpr double kProbeNudgeSeconds = 1e-9;
} // namespace

AccessSwitch::AccessSwitch(const SwitchConfig& config, EventQueue& events,
                           MetricsCollector& metrics)
    : config_(config), events_(events), metrics_(metrics) {
    if (config_.profiles.empty())
        throw std::invalid_argument("switch: no subscribers configured");
    if (config_.peak_rate_bps > config_.line_rate_bps)
        throw std::invalid_argument("switch: peak rate exceeds line rate");
    if (config_.line_rate_bps <= 0.0 || config_.mtu_bytes == 0)
        throw std::invalid_argument("switch: line rate and MTU must be positive");

    const double now = events_.now();
    shapers_.reserve(config_.profiles.size());
    subs_.resize(config_.profiles.size());
    for (size_t i = 0; i < config_.profiles.size(); ++i) {
        const SubscriberProfile& p = config_.profiles[i];
        const double capacity = bucket_capacity_bytes(p.assigned_rate_bps, p.bucket_multiplier);
        if (capacity < static_cast<double>(config_.mtu_bytes))
            throw std::invalid_argument("switch: bucket capacity below MTU; packets could never conform");
        TokenBucket rate_bucket(capacity, p.assigned_rate_bps, capacity, now);
        TokenBucket peak_bucket(static_cast<double>(config_.mtu_bytes), config_.peak_rate_bps,
                                static_cast<double>(config_.mtu_bytes), now);
        shapers_.emplace_back(p.subscriber, rate_bucket, peak_bucket);
        subs_[i].initial_tokens = capacity;
        // Metrics and scheduling address subscribers by slot; ids are dense.
        if (p.subscriber != static_cast<SubscriberId>(i))
            throw std::invalid_argument("switch: subscriber ids must equal their slot index");
    }

    if (config_.mode == ShapingMode::Ctbf) {
        controller_.emplace(config_.profiles, config_.policy);
        run_controller_refresh();
    }
}

void AccessSwitch::set_delivery_callback(std::function<void(const Packet&, double)> callback) {
    delivery_callback_ = std::move(callback);
}

void AccessSwitch::ingress(const Packet& packet) {
    if (packet.subscriber >= shapers_.size())
        throw std::invalid_argument("switch: unknown subscriber id");
    if (packet.length == 0 || packet.length > config_.mtu_bytes)
        throw std::logic_error("switch: packet length outside (0, MTU]");
    shapers_[packet.subscriber].enqueue(packet);
    pump(packet.subscriber);
}

void AccessSwitch::pump(size_t index) {
    SubMeta& meta = subs_[index];
    if (meta.staged)
        return;
    if (meta.eligible_event != EventQueue::kNoHandle) {
        events_.cancel(meta.eligible_event);
        meta.eligible_event = EventQueue::kNoHandle;
    }

    const double now = events_.now();
    DispatchResult result = shapers_[index].try_dispatch(now);
    if (result.dispatched) {
        metrics_.record_tokens(static_cast<SubscriberId>(index), result.rate_accrual.generated,
                               result.rate_accrual.discarded);
        metrics_.record_consumed(static_cast<SubscriberId>(index), result.dispatched->length);
        meta.staged = result.dispatched;
        start_line_if_idle();
        after_token_change(index);
    } else if (result.next_eligible) {
        meta.eligible_time = *result.next_eligible;
        meta.eligible_event = events_.schedule(meta.eligible_time, [this, index] {
            subs_[index].eligible_event = EventQueue::kNoHandle;
            pump(index);
        });
    }
}

void AccessSwitch::rearm_eligibility(size_t index) {
    SubMeta& meta = subs_[index];
    if (meta.staged)
        return;

    const double now = events_.now();
    auto eligible = shapers_[index].head_eligible_at(now);
    if (!eligible) {
        if (meta.eligible_event != EventQueue::kNoHandle) {
            events_.cancel(meta.eligible_event);
            meta.eligible_event = EventQueue::kNoHandle;
        }
        return;
    }

    const double at = std::max(*eligible, now);
    if (meta.eligible_event != EventQueue::kNoHandle && meta.eligible_time == at)
        return;   // unchanged; keeping the pending event preserves tie order
    if (meta.eligible_event != EventQueue::kNoHandle)
        events_.cancel(meta.eligible_event);
    meta.eligible_time = at;
    meta.eligible_event = events_.schedule(at, [this, index] {
        subs_[index].eligible_event = EventQueue::kNoHandle;
        pump(index);
    });
}

void AccessSwitch::rearm_threshold_probe(size_t index) {
    SubMeta& meta = subs_[index];
    if (meta.probe_event != EventQueue::kNoHandle) {
        events_.cancel(meta.probe_event);
        meta.probe_event = EventQueue::kNoHandle;
    }
    if (!controller_ || controller_->states()[index] == Activity::Inactive)
        return;   // inactive subscribers leave that state by consumption only

    const double now = events_.now();
    const TokenBucket& bucket = shapers_[index].rate_bucket();
    const double target = controller_->policy().threshold_fraction * bucket.capacity();
    auto crossing = bucket.time_until_tokens(now, target);
    if (!crossing)
        return;   // zero fill rate: the bucket can never fill past the threshold
    meta.probe_event =
        events_.schedule(std::max(*crossing, now) + kProbeNudgeSeconds, [this, index] {
            subs_[index].probe_event = EventQueue::kNoHandle;
            after_token_change(index);
        });
}

void AccessSwitch::after_token_change(size_t index) {
    if (!controller_)
        return;
    const Activity fresh = controller_->classify_shaper(shapers_[index], events_.now());
    if (fresh != controller_->states()[index])
        run_controller_refresh();
    else
        rearm_threshold_probe(index);
}

void AccessSwitch::run_controller_refresh() {
    RefreshOutcome refreshed = controller_->on_transition(events_.now(), shapers_);
    if (!refreshed.recomputed)
        return;
    for (size_t i = 0; i < refreshed.accruals.size(); ++i)
        metrics_.record_tokens(static_cast<SubscriberId>(i), refreshed.accruals[i].generated,
                               refreshed.accruals[i].discarded);
    // Fill rates moved: every closed-form instant derived from them is stale.
    for (size_t i = 0; i < shapers_.size(); ++i) {
        rearm_eligibility(i);
        rearm_threshold_probe(i);
    }
}

std::optional<size_t> AccessSwitch::pick_index() const {
    const size_t n = subs_.size();
    for (size_t step = 0; step < n; ++step) {
        const size_t i = (rr_cursor_ + step) % n;
        if (subs_[i].staged)
            return i;
    }
    return std::nullopt;
}

std::optional<SubscriberId> AccessSwitch::scheduler_pick() const {
    auto index = pick_index();
    if (!index)
        return std::nullopt;
    return config_.profiles[*index].subscriber;
}

void AccessSwitch::start_line_if_idle() {
    if (line_busy_)
        return;
    auto index = pick_index();
    if (!index)
        return;

    serving_ = *index;
    rr_cursor_ = (*index + 1) % subs_.size();
    line_busy_ = true;
    const Packet& packet = *subs_[serving_].staged;
    busy_until_ = events_.now() +
                  static_cast<double>(packet.length) * 8.0 / config_.line_rate_bps;
    events_.schedule(busy_until_, [this] { on_line_complete(); });
}

void AccessSwitch::on_line_complete() {
    const size_t index = serving_;
    const Packet packet = *subs_[index].staged;
    subs_[index].staged.reset();
    line_busy_ = false;

    if (departure_log_on_)
        departures_.push_back({events_.now(), packet.subscriber, packet.length});
    metrics_.record_delivered(static_cast<SubscriberId>(index), packet.length);

    pump(index);
    if (delivery_callback_)
        delivery_callback_(packet, events_.now());
    start_line_if_idle();
}

void AccessSwitch::settle_all(double now) {
    for (size_t i = 0; i < shapers_.size(); ++i) {
        const TokenAccrual acc = shapers_[i].rate_bucket().settle(now);
        metrics_.record_tokens(static_cast<SubscriberId>(i), acc.generated, acc.discarded);
        metrics_.set_bucket_levels(static_cast<SubscriberId>(i), subs_[i].initial_tokens,
                                   shapers_[i].rate_bucket().tokens_at(now));
    }
}

bool AccessSwitch::work_conserving(double now) const {
    if (line_busy_)
        return true;
    for (size_t i = 0; i < shapers_.size(); ++i) {
        if (subs_[i].staged)
            return false;
        const SubscriberShaper& shaper = shapers_[i];
        if (!shaper.queue_empty() && shaper.rate_bucket().conforms_at(now, shaper.head().length) &&
            shaper.peak_bucket().conforms_at(now, shaper.head().length))
            return false;
    }
    return true;
}

} // namespace ctbf
