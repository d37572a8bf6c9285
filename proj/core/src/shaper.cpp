#include "ctbf/shaper.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctbf {

namespace {
// Nudge for closed-form eligibility instants; see kConformSlackBytes.
constexpr double kEligibilityNudgeSeconds = 1e-9;
} // namespace

SubscriberShaper::SubscriberShaper(SubscriberId id, TokenBucket rate_bucket,
                                   TokenBucket peak_bucket)
    : id_(id), rate_bucket_(rate_bucket), peak_bucket_(peak_bucket) {}

void SubscriberShaper::enqueue(const Packet& packet) {
    if (packet.length == 0)
        throw std::logic_error("shaper: zero-length packet");
    queued_bytes_ += packet.length;
    queue_.push_back(packet);
}

std::optional<double> SubscriberShaper::head_eligible_at(double now) const {
    if (queue_.empty())
        return std::nullopt;
    const uint32_t length = queue_.front().length;
    if (rate_bucket_.conforms_at(now, length) && peak_bucket_.conforms_at(now, length))
        return now;
    const auto t_rate = rate_bucket_.time_until_tokens(now, static_cast<double>(length));
    const auto t_peak = peak_bucket_.time_until_tokens(now, static_cast<double>(length));
    if (!t_rate || !t_peak)
        return std::nullopt;
    return std::max(*t_rate, *t_peak) + kEligibilityNudgeSeconds;
}

DispatchResult SubscriberShaper::try_dispatch(double now) {
    DispatchResult result;
    if (queue_.empty())
        return result;

    const Packet& head = queue_.front();
    if (rate_bucket_.conforms_at(now, head.length) && peak_bucket_.conforms_at(now, head.length)) {
        result.rate_accrual = rate_bucket_.consume(now, head.length);
        peak_bucket_.consume(now, head.length);
        result.dispatched = head;
        queued_bytes_ -= head.length;
        queue_.pop_front();
        return result;
    }

    auto eligible = head_eligible_at(now);
    if (eligible && *eligible > now)
        result.next_eligible = eligible;
    return result;
}

} // namespace ctbf
