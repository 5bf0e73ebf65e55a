#pragma once

#include <cstdint>
#include <limits>

namespace kcd {

/// SplitMix64 finalizer (Stafford variant 13). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64 (Steele, Lea, Flood 2014): a Weyl sequence with increment
/// 0x9E3779B97F4A7C15 passed through mix64. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Independent generator for a numbered substream of `seed`. Work units
    /// (not threads) own substreams, so output does not depend on how units are
    /// scheduled across workers.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept;

private:
    std::uint64_t state_;
};

}  // namespace kcd
