#include "ctbf/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctbf {

Activity classify(double tokens, double capacity, double threshold_fraction) {
    return tokens >= threshold_fraction * capacity ? Activity::Inactive : Activity::Active;
}

double contribution_weight(const SubscriberProfile& profile,
                           std::span<const SubscriberProfile> denominator_set) {
    if (denominator_set.empty())
        throw std::logic_error("contribution weight: empty denominator set");
    double total = 0.0;
    for (const auto& p : denominator_set)
        total += p.assigned_rate_bps;
    return profile.assigned_rate_bps / total;
}

double compute_pool(std::span<const Activity> states,
                    std::span<const SubscriberProfile> profiles,
                    double retention_fraction) {
    double pool = 0.0;
    for (size_t i = 0; i < profiles.size(); ++i)
        if (states[i] == Activity::Inactive)
            pool += profiles[i].assigned_rate_bps * (1.0 - retention_fraction);
    return pool;
}

namespace {

void fill_substitutes(DistributionOutcome& out,
                      std::span<const SubscriberProfile> profiles,
                      std::span<const Activity> states,
                      double retention_fraction) {
    out.rate_modifier.assign(profiles.size(), 0.0);
    for (size_t i = 0; i < profiles.size(); ++i)
        if (states[i] == Activity::Inactive)
            out.rate_modifier[i] = profiles[i].assigned_rate_bps * retention_fraction;
}

} // namespace

DistributionOutcome distribute_balanced(double pool,
                                        std::span<const SubscriberProfile> profiles,
                                        std::span<const Activity> states,
                                        const DistributionPolicy& policy) {
    DistributionOutcome out;
    out.shared_pool = pool;
    fill_substitutes(out, profiles, states, policy.retention_fraction);

    double total_assigned = 0.0;
    for (const auto& p : profiles)
        total_assigned += p.assigned_rate_bps;

    double distributed = 0.0;
    for (size_t i = 0; i < profiles.size(); ++i) {
        if (states[i] != Activity::Active)
            continue;
        const double bonus = pool * profiles[i].assigned_rate_bps / total_assigned;
        out.rate_modifier[i] = bonus;
        distributed += bonus;
    }
    out.wasted_rate = std::max(0.0, pool - distributed);
    return out;
}

DistributionOutcome distribute_defined_cap(double pool,
                                           std::span<const SubscriberProfile> profiles,
                                           std::span<const Activity> states,
                                           const DistributionPolicy& policy) {
    DistributionOutcome out;
    out.shared_pool = pool;
    fill_substitutes(out, profiles, states, policy.retention_fraction);

    std::vector<size_t> open;   // active subscribers still below their cap
    for (size_t i = 0; i < profiles.size(); ++i)
        if (states[i] == Activity::Active)
            open.push_back(i);

    double remaining = pool;
    while (remaining > 0.0 && !open.empty()) {
        double denom = 0.0;
        for (size_t i : open)
            denom += profiles[i].assigned_rate_bps;

        std::vector<size_t> still_open;
        double handed = 0.0;
        for (size_t i : open) {
            const double share = remaining * profiles[i].assigned_rate_bps / denom;
            const double headroom =
                profiles[i].assigned_rate_bps * (policy.cap_multiplier - 1.0) -
                out.rate_modifier[i];
            if (share >= headroom) {
                out.rate_modifier[i] += headroom;
                handed += headroom;
            } else {
                still_open.push_back(i);
            }
        }
        if (still_open.size() == open.size()) {
            // nobody hit a cap: spend the rest proportionally and stop
            for (size_t i : open)
                out.rate_modifier[i] += remaining * profiles[i].assigned_rate_bps / denom;
            remaining = 0.0;
        } else {
            remaining = std::max(0.0, remaining - handed);
            open = std::move(still_open);
        }
    }
    out.wasted_rate = remaining;
    return out;
}

DistributionOutcome compute_outcome(std::span<const SubscriberProfile> profiles,
                                    std::span<const Activity> states,
                                    const DistributionPolicy& policy) {
    const double pool = compute_pool(states, profiles, policy.retention_fraction);
    return policy.kind == DistributionKind::Balanced
               ? distribute_balanced(pool, profiles, states, policy)
               : distribute_defined_cap(pool, profiles, states, policy);
}

double effective_rate(const SubscriberProfile& profile, Activity state, double rate_modifier) {
    return state == Activity::Active ? profile.assigned_rate_bps + rate_modifier
                                     : rate_modifier;
}

CtbfController::CtbfController(std::vector<SubscriberProfile> profiles, DistributionPolicy policy)
    : profiles_(std::move(profiles)), policy_(policy) {
    if (profiles_.empty())
        throw std::logic_error("controller: no subscribers");
    for (const auto& p : profiles_)
        if (p.assigned_rate_bps <= 0.0)
            throw std::logic_error("controller: assigned rate must be positive");
    states_.assign(profiles_.size(), Activity::Active);
    outcome_.rate_modifier.assign(profiles_.size(), 0.0);
}

double CtbfController::effective_rate_of(size_t index) const {
    return effective_rate(profiles_[index], states_[index], outcome_.rate_modifier[index]);
}

Activity CtbfController::classify_shaper(const SubscriberShaper& shaper, double now) const {
    const TokenBucket& bucket = shaper.rate_bucket();
    return classify(bucket.tokens_at(now), bucket.capacity(), policy_.threshold_fraction);
}

RefreshOutcome CtbfController::on_transition(double now, std::span<SubscriberShaper> shapers) {
    RefreshOutcome result;
    std::vector<Activity> fresh(profiles_.size());
    for (size_t i = 0; i < profiles_.size(); ++i)
        fresh[i] = classify_shaper(shapers[i], now);
    if (initialized_ && fresh == states_)
        return result;

    states_ = std::move(fresh);
    outcome_ = compute_outcome(profiles_, states_, policy_);
    initialized_ = true;

    double sum_assigned = 0.0, sum_effective = 0.0;
    for (size_t i = 0; i < profiles_.size(); ++i) {
        sum_assigned += profiles_[i].assigned_rate_bps;
        sum_effective += effective_rate_of(i);
    }
    const double rel = std::abs(sum_effective + outcome_.wasted_rate - sum_assigned) / sum_assigned;
    stats_.max_conservation_rel_error = std::max(stats_.max_conservation_rel_error, rel);
    ++stats_.recomputations;

    result.recomputed = true;
    result.accruals.resize(profiles_.size());
    for (size_t i = 0; i < profiles_.size(); ++i)
        result.accruals[i] = shapers[i].rate_bucket().set_fill_rate(now, effective_rate_of(i));
    return result;
}

} // namespace ctbf
