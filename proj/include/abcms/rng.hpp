#pragma once

#include <cstdint>

#include "abcms/normal.hpp"

namespace abcms {

// Counter-based stream RNG. Every draw is a pure function of
// (key, counter), so a stream can be split across tasks and replayed
// exactly regardless of thread count or scheduling. Derivation mixes
// the parent key with a salt, giving statistically independent
// substreams for (master seed, task index) pairs.
class RngStream {
public:
    RngStream() = default;

    static RngStream from(std::uint64_t master_seed, std::uint64_t stream_id) {
        RngStream s;
        s.key_ = mix(master_seed ^ mix(stream_id + kGolden));
        return s;
    }

    // Independent substream; counter restarts at zero.
    RngStream derive(std::uint64_t salt) const {
        RngStream s;
        s.key_ = mix(key_ ^ mix(salt + kGolden2));
        return s;
    }

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix(key_ + counter_ * kGolden);
    }

    // Uniform on the open interval (0,1); never returns an endpoint,
    // so inverse-CDF transforms stay finite.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via inverse CDF (order-stable, no rejection).
    double normal() { return normal_quantile(uniform()); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden  = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kGolden2 = 0xbf58476d1ce4e5b9ULL;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace abcms
