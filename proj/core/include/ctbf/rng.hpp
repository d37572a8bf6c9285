#pragma once

#include <cstdint>
#include <random>

#include "ctbf/packet.hpp"

namespace ctbf {

enum class StreamKind : uint32_t { HttpSource = 1, FtpSource = 2, VideoSource = 3, Auxiliary = 4 };

/// One named pseudo-random stream, derived from (master seed, subscriber,
/// kind, user). Adding a subscriber or enabling another model never perturbs
/// anyone else's draws, which keeps sweep points paired across policies.
/// Samplers are inverse-CDF/Box-Muller over the raw engine so the drawn
/// values do not depend on the standard library's distribution internals.
class RandomStream {
public:
    RandomStream(uint64_t master_seed, SubscriberId subscriber, StreamKind kind,
                 uint32_t user = 0);

    uint64_t next_u64() { return engine_(); }
    double uniform();   // [0, 1)
    double exponential(double mean);
    double normal(double mean, double stddev);
    /// Lognormal parameterized by its median and log-space sigma.
    double lognormal_median(double median, double sigma);
    /// Lognormal parameterized by its mean and coefficient of variation.
    double lognormal_mean_cv(double mean, double cv);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

} // namespace ctbf
