#pragma once

#include <cstdint>

namespace rcmdp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream key for substream i of `seed`: mix64(seed ^ mix64(i)).
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t i) { return mix64(seed ^ mix64(i)); }

/**
 * Counter-based generator: draw n of stream `key` is mix64(key + n * golden).
 *
 * Any (key, counter) position can be recomputed without replaying the
 * stream, so trials get independent substreams keyed by substream_key().
 * Outputs are identical on every platform.
 */
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t next() {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n) by rejection (no modulo bias).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rcmdp
