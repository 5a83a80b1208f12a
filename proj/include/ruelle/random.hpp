#pragma once

#include <cstdint>

namespace ruelle {

// splitmix64: tiny, well-mixed, and trivially substreamable, which keeps
// Monte Carlo output byte-identical for any worker count (substreams are
// keyed by sample index, not by worker).
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

// Independent substream for a given counter (e.g. one per Monte Carlo sample).
inline SplitMix64 substream(std::uint64_t root_seed, std::uint64_t counter) {
    SplitMix64 mixer(root_seed + counter * 0x9E3779B97F4A7C15ULL);
    return SplitMix64(mixer.next_u64());
}

}  // namespace ruelle
