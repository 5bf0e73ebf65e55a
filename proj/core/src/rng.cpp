#include "kcd/rng.hpp"

namespace kcd {

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

}  // namespace kcd
