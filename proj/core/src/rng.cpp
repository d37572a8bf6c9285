#include "ctbf/rng.hpp"

#include <cmath>

namespace ctbf {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RandomStream::RandomStream(uint64_t master_seed, SubscriberId subscriber, StreamKind kind,
                           uint32_t user) {
    uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ (0x5353ULL << 32 ^ subscriber));
    s = splitmix64(s ^ (static_cast<uint64_t>(kind) << 16 ^ user));
    engine_.seed(s);
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double mean) {
    return -mean * std::log(1.0 - uniform());
}

double RandomStream::normal(double mean, double stddev) {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return mean + stddev * cached_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    const double theta = 2.0 * M_PI * uniform();
    cached_normal_ = r * std::sin(theta);
    have_cached_normal_ = true;
    return mean + stddev * r * std::cos(theta);
}

double RandomStream::lognormal_median(double median, double sigma) {
    return std::exp(std::log(median) + sigma * normal(0.0, 1.0));
}

double RandomStream::lognormal_mean_cv(double mean, double cv) {
    const double sigma2 = std::log(1.0 + cv * cv);
    const double mu = std::log(mean) - 0.5 * sigma2;
    return std::exp(mu + std::sqrt(sigma2) * normal(0.0, 1.0));
}

} // namespace ctbf
