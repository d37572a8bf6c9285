#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "ctbf/packet.hpp"
#include "ctbf/token_bucket.hpp"

namespace ctbf {

/// Outcome of one dispatch attempt.
struct DispatchResult {
    std::optional<Packet> dispatched;
    /// Earliest time the head packet will conform to both buckets; set only
    /// when a head packet exists and had to stay queued. nullopt when the
    /// queue is empty, a packet was dispatched, or the head can never conform
    /// at the current fill rates.
    std::optional<double> next_eligible;
    /// Rate-bucket settlement performed by a successful dispatch (waste
    /// accounting input). Zero when nothing was consumed.
    TokenAccrual rate_accrual;
};

/// Per-subscriber dual-bucket shaper: a rate bucket sized from the assigned
/// rate, an MTU-sized peak bucket refilled at the peak rate, and the FIFO of
/// packets awaiting tokens. A packet leaves only when it conforms to both
/// buckets at once; back-to-back conformant packets therefore drain at the
/// peak rate until the rate bucket runs out.
class SubscriberShaper {
public:
    SubscriberShaper(SubscriberId id, TokenBucket rate_bucket, TokenBucket peak_bucket);

    SubscriberId id() const { return id_; }
    TokenBucket& rate_bucket() { return rate_bucket_; }
    const TokenBucket& rate_bucket() const { return rate_bucket_; }
    TokenBucket& peak_bucket() { return peak_bucket_; }
    const TokenBucket& peak_bucket() const { return peak_bucket_; }

    void enqueue(const Packet& packet);
    bool queue_empty() const { return queue_.empty(); }
    size_t queue_length() const { return queue_.size(); }
    size_t queued_bytes() const { return queued_bytes_; }
    const Packet& head() const { return queue_.front(); }

    /// When the head packet conforms to both buckets at `now`, the earliest
    /// eligibility is `now` itself; otherwise the closed-form instant both
    /// buckets reach the head's length (plus a 1 ns nudge so accrual at the
    /// returned time lands on the conforming side of the boundary). Pure.
    std::optional<double> head_eligible_at(double now) const;

    /// Dispatch the head packet if it conforms to both buckets, consuming
    /// tokens from both; otherwise report when it becomes eligible.
    DispatchResult try_dispatch(double now);

private:
    SubscriberId id_;
    TokenBucket rate_bucket_;
    TokenBucket peak_bucket_;
    std::deque<Packet> queue_;
    size_t queued_bytes_ = 0;
};

} // namespace ctbf
