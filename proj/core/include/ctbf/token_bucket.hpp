#pragma once

#include <cstdint>
#include <optional>

namespace ctbf {

/// Bytes credited to and overflowing from a bucket during one settlement.
struct TokenAccrual {
    double generated = 0.0;   // produced by the fill rate since the last settlement
    double discarded = 0.0;   // overflowed a full bucket
};

/// Token store with lazy, closed-form accrual.
///
/// The bucket never ticks. The level at any instant follows from the last
/// settlement point and the constant fill rate since then, so reads are pure:
/// observing the level more or less often cannot change later arithmetic.
/// State advances only on consume(), settle(), and fill-rate changes.
class TokenBucket {
public:
    TokenBucket() = default;
    TokenBucket(double capacity_bytes, double fill_rate_bps, double initial_tokens, double now);

    double capacity() const { return capacity_; }
    double fill_rate() const { return fill_rate_; }
    double last_update() const { return anchor_time_; }

    /// Token level at `now`, clamped to [0, capacity]. Pure.
    double tokens_at(double now) const;

    /// True iff a packet of `length` bytes conforms at `now` (length <= level,
    /// with a sub-byte slack absorbing accrual rounding). Pure.
    bool conforms_at(double now, uint32_t length) const;

    /// Advance the settlement point to `now`, crediting fill and counting
    /// overflow against the capacity clamp.
    TokenAccrual settle(double now);

    /// Settle and remove `length` bytes. The packet must conform.
    TokenAccrual consume(double now, uint32_t length);

    /// Install a new fill rate, settling at the old rate first so the level
    /// integrates the piecewise-constant rate exactly. Unchanged rates are a
    /// complete no-op (the anchor is left untouched).
    TokenAccrual set_fill_rate(double now, double fill_rate_bps);

    /// Earliest time >= now at which the level reaches `amount` bytes, in
    /// closed form from the fill rate. nullopt when the level can never get
    /// there at the current rate.
    std::optional<double> time_until_tokens(double now, double amount) const;

private:
    double elapsed_or_throw(double now) const;

    double capacity_ = 0.0;
    double fill_rate_ = 0.0;      // bits per second
    double anchor_tokens_ = 0.0;  // bytes at anchor_time_
    double anchor_time_ = 0.0;    // seconds
};

/// Proportional bucket sizing: assigned rate times the per-link multiplier
/// (bits of bucket per bps of assigned rate), expressed in bytes.
double bucket_capacity_bytes(double assigned_rate_bps, double multiplier_bits_per_bps);

/// Conformance slack, in bytes. Dispatch-eligibility times are computed in
/// closed form and rounding can land the level an ulp short of the packet
/// length; anything within this slack counts as conforming.
constexpr double kConformSlackBytes = 1e-6;

} // namespace ctbf
