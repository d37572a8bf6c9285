#include "ctbf/token_bucket.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctbf {

TokenBucket::TokenBucket(double capacity_bytes, double fill_rate_bps, double initial_tokens,
                         double now)
    : capacity_(capacity_bytes),
      fill_rate_(fill_rate_bps),
      anchor_tokens_(std::clamp(initial_tokens, 0.0, capacity_bytes)),
      anchor_time_(now) {
    if (capacity_bytes < 0.0 || fill_rate_bps < 0.0)
        throw std::logic_error("token bucket: negative capacity or fill rate");
}

double TokenBucket::elapsed_or_throw(double now) const {
    const double dt = now - anchor_time_;
    if (dt < 0.0)
        throw std::logic_error("token bucket: time ran backwards (simulation clock violation)");
    return dt;
}

double TokenBucket::tokens_at(double now) const {
    const double dt = elapsed_or_throw(now);
    return std::min(capacity_, anchor_tokens_ + fill_rate_ / 8.0 * dt);
}

bool TokenBucket::conforms_at(double now, uint32_t length) const {
    return tokens_at(now) >= static_cast<double>(length) - kConformSlackBytes;
}

TokenAccrual TokenBucket::settle(double now) {
    const double dt = elapsed_or_throw(now);
    TokenAccrual acc;
    acc.generated = fill_rate_ / 8.0 * dt;
    const double level = std::min(capacity_, anchor_tokens_ + acc.generated);
    acc.discarded = std::max(0.0, acc.generated - (level - anchor_tokens_));
    anchor_tokens_ = level;
    anchor_time_ = now;
    return acc;
}

TokenAccrual TokenBucket::consume(double now, uint32_t length) {
    if (!conforms_at(now, length))
        throw std::logic_error("token bucket: consume without conformance");
    TokenAccrual acc = settle(now);
    anchor_tokens_ = std::max(0.0, anchor_tokens_ - static_cast<double>(length));
    return acc;
}

TokenAccrual TokenBucket::set_fill_rate(double now, double fill_rate_bps) {
    if (fill_rate_bps < 0.0)
        throw std::logic_error("token bucket: negative fill rate");
    if (fill_rate_bps == fill_rate_)
        return {};
    TokenAccrual acc = settle(now);
    fill_rate_ = fill_rate_bps;
    return acc;
}

std::optional<double> TokenBucket::time_until_tokens(double now, double amount) const {
    const double level = tokens_at(now);
    if (level >= amount - kConformSlackBytes)
        return now;
    if (fill_rate_ <= 0.0 || amount > capacity_)
        return std::nullopt;
    return now + (amount - level) * 8.0 / fill_rate_;
}

double bucket_capacity_bytes(double assigned_rate_bps, double multiplier_bits_per_bps) {
    if (assigned_rate_bps <= 0.0 || multiplier_bits_per_bps <= 0.0)
        throw std::invalid_argument(
            "bucket sizing: assigned rate and multiplier must be positive");
    return assigned_rate_bps * multiplier_bits_per_bps / 8.0;
}

} // namespace ctbf
