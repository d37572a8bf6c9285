#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctbf/packet.hpp"
#include "ctbf/shaper.hpp"

namespace ctbf {

/// Contracted shaping parameters of one subscriber.
struct SubscriberProfile {
    SubscriberId subscriber = 0;
    double assigned_rate_bps = 0.0;   // token generation rate per contract
    double bucket_multiplier = 8.0;   // bucket bits per bps of assigned rate
};

enum class Activity : uint8_t { Active = 0, Inactive = 1 };

enum class DistributionKind : uint8_t { Balanced, DefinedCap };

/// How rate donated by inactive subscribers is handed back out.
struct DistributionPolicy {
    DistributionKind kind = DistributionKind::DefinedCap;
    /// Effective-rate ceiling as a multiple of the assigned rate (DefinedCap).
    double cap_multiplier = 2.0;
    /// Fraction of the assigned rate an inactive subscriber keeps; the rest
    /// is donated to the shared pool.
    double retention_fraction = 0.10;
    /// Bucket fullness at or above which a subscriber counts as inactive.
    /// A full bucket means an idle line; keeping the threshold below 1
    /// stops small packet sequences (single pages) from flipping the state.
    double threshold_fraction = 0.95;
};

/// Per-subscriber rate modifiers plus the undistributed remainder,
/// recomputed on every activity transition.
struct DistributionOutcome {
    /// Bonus rate for an active subscriber, substitute rate for an inactive
    /// one, in bits per second. Indexed like the profile list.
    std::vector<double> rate_modifier;
    double shared_pool = 0.0;   // total rate currently donated by inactive subscribers
    double wasted_rate = 0.0;   // pool share no active subscriber could absorb
};

/// Inactive iff the bucket is at or above threshold_fraction of capacity.
Activity classify(double tokens, double capacity, double threshold_fraction);

/// This subscriber's assigned rate as a fraction of the denominator set's
/// total assigned rate. The set must be non-empty.
double contribution_weight(const SubscriberProfile& profile,
                           std::span<const SubscriberProfile> denominator_set);

/// Total rate donated by inactive subscribers.
double compute_pool(std::span<const Activity> states,
                    std::span<const SubscriberProfile> profiles,
                    double retention_fraction);

/// Balanced policy: every active subscriber receives pool x its weight over
/// ALL subscribers. Lossy by construction: the pool share corresponding to
/// inactive subscribers' weights goes undistributed.
DistributionOutcome distribute_balanced(double pool,
                                        std::span<const SubscriberProfile> profiles,
                                        std::span<const Activity> states,
                                        const DistributionPolicy& policy);

/// Defined-cap policy: the pool is water-filled over active subscribers,
/// proportionally to assigned rates (weights renormalized over the active
/// set), clamping each bonus so the effective rate never exceeds
/// assigned x cap_multiplier; remainders are redistributed to subscribers
/// still below their cap until the pool is spent or everyone is capped.
DistributionOutcome distribute_defined_cap(double pool,
                                           std::span<const SubscriberProfile> profiles,
                                           std::span<const Activity> states,
                                           const DistributionPolicy& policy);

/// Pool + policy dispatch in one step.
DistributionOutcome compute_outcome(std::span<const SubscriberProfile> profiles,
                                    std::span<const Activity> states,
                                    const DistributionPolicy& policy);

/// Active: assigned + bonus. Inactive: the substitute rate.
double effective_rate(const SubscriberProfile& profile, Activity state, double rate_modifier);

struct ControllerStats {
    uint64_t recomputations = 0;
    /// max over recomputations of |sum effective + wasted - sum assigned|
    /// relative to sum assigned.
    double max_conservation_rel_error = 0.0;
};

struct RefreshOutcome {
    bool recomputed = false;
    /// Settlements performed while installing changed fill rates, indexed
    /// like the profile list. Empty when nothing was recomputed.
    std::vector<TokenAccrual> accruals;
};

/// Tracks every subscriber's activity state and keeps the shapers' rate-bucket
/// fill rates equal to the current effective rates. One instance per switch.
class CtbfController {
public:
    CtbfController(std::vector<SubscriberProfile> profiles, DistributionPolicy policy);

    const DistributionPolicy& policy() const { return policy_; }
    const std::vector<SubscriberProfile>& profiles() const { return profiles_; }
    const std::vector<Activity>& states() const { return states_; }
    const DistributionOutcome& outcome() const { return outcome_; }
    const ControllerStats& stats() const { return stats_; }

    double effective_rate_of(size_t index) const;

    /// Activity of one subscriber as the bucket stands at `now`. Pure.
    Activity classify_shaper(const SubscriberShaper& shaper, double now) const;

    /// Re-evaluate every subscriber's activity from its rate bucket. When
    /// anything changed (or on the first call) the pool and modifiers are
    /// recomputed and the new fill rates installed on the rate buckets; a
    /// bucket whose rate changes is settled at its old rate first. Peak
    /// buckets are never touched.
    RefreshOutcome on_transition(double now, std::span<SubscriberShaper> shapers);

private:
    std::vector<SubscriberProfile> profiles_;
    DistributionPolicy policy_;
    std::vector<Activity> states_;
    DistributionOutcome outcome_;
    ControllerStats stats_;
    bool initialized_ = false;
};

} // namespace ctbf
