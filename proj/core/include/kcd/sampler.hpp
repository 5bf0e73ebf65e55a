#pragma once

#include <bitset>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kcd/cipher.hpp"
#include "kcd/state.hpp"

// Monte Carlo harness for truncated inner c-differentials: pairs
// (x, c*x ^ a) are encrypted and the masked output difference is tallied
// per masked input difference.
namespace kcd::sampler {

/// Active nibbles of a 128-bit difference. Nibble k lives in experiment byte
/// k/2, and experiment byte j is State byte 15 - j (counted from the right of
/// the hex rendering). Even k is the high nibble of its byte.
class NibbleMask {
public:
    NibbleMask() = default;
    /// Throws std::invalid_argument for an index >= 32.
    static NibbleMask from_indices(std::span<const int> indices);
    static NibbleMask from_bits(std::uint32_t bits) noexcept { return NibbleMask(bits); }
    /// Both nibbles of experiment byte k (0..15).
    static NibbleMask experiment_byte(int k);
    static NibbleMask full() noexcept { return NibbleMask(0xFFFFFFFFu); }

    std::uint32_t bits() const noexcept { return bits_; }
    bool empty() const noexcept { return bits_ == 0; }
    int count() const noexcept;
    bool contains(int nibble) const noexcept { return nibble >= 0 && nibble < 32 && ((bits_ >> nibble) & 1u); }
    std::vector<int> indices() const;

    /// AND-mask that keeps exactly the active nibbles.
    State and_mask() const noexcept;
    /// State byte positions touched by at least one active nibble.
    std::bitset<16> active_bytes() const noexcept;

    friend bool operator==(const NibbleMask&, const NibbleMask&) = default;

private:
    explicit NibbleMask(std::uint32_t bits) : bits_(bits) {}
    std::uint32_t bits_ = 0;
};

int nibble_byte(int nibble) noexcept;

struct MaskConfig {
    std::string name;
    NibbleMask input;
    NibbleMask output;
};

/// Accepts "byte_<i>_in->byte_<j>_out" or a literal "in=16,17;out=16,17".
MaskConfig parse_mask(std::string_view spec);
MaskConfig byte_mask(int in_byte, int out_byte);
/// Twelve byte-level configurations: same-byte pairs for even bytes 0..14
/// plus 0->1, 2->3, 4->5 and 14->15.
std::vector<MaskConfig> default_masks();
/// Throws std::invalid_argument if the input mask is empty.
void validate(const MaskConfig& m);

State project(const State& s, const NibbleMask& m) noexcept;
/// True iff every byte in `active` is nonzero in `delta`.
bool pattern_match(const State& delta, const std::bitset<16>& active) noexcept;
State multiply_state(const State& c_vector, const State& x) noexcept;

State broadcast_c(std::uint8_t c) noexcept;
/// c at the bytes touched by the input mask, field identity elsewhere.
State masked_c(std::uint8_t c, const NibbleMask& input) noexcept;

struct ExperimentConfig {
    int rounds = cipher::kFullRounds;
    State c_vector = broadcast_c(1);
    MaskConfig masks;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    MasterKey master_key;
};

void validate(const ExperimentConfig& cfg);

struct PairKey {
    State a;
    State b;
    friend bool operator==(const PairKey&, const PairKey&) = default;
    friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept;
};

struct FrequencyMap {
    std::unordered_map<PairKey, std::uint64_t, PairKeyHash> counts;
    std::uint64_t trials_used = 0;
    std::uint64_t trials_skipped = 0;
    /// Trials whose full output difference is nonzero on every byte touched by
    /// the output mask. Secondary tally; statistics use `counts`.
    std::uint64_t pattern_matches = 0;

    std::uint64_t total_count() const noexcept;
    std::uint64_t trials() const noexcept { return trials_used + trials_skipped; }
    std::uint64_t count(const State& a, const State& b) const noexcept;
    /// Entries ordered by (a, b).
    std::vector<std::pair<PairKey, std::uint64_t>> sorted() const;

    friend bool operator==(const FrequencyMap&, const FrequencyMap&) = default;
};

void merge_into(FrequencyMap& dst, const FrequencyMap& src);
FrequencyMap merge(std::span<const FrequencyMap> maps);

/// Trials per scheduling unit.
inline constexpr std::uint64_t kBatchSize = 1024;

/// Runs trials with global indices [first, first + n). Trial t draws from
/// SplitMix64::substream(seed, t), so any partition of the index range merges
/// to the same map.
FrequencyMap run_trial_range(const ExperimentConfig& cfg, const cipher::Kuznyechik& cipher,
                             std::uint64_t first, std::uint64_t n);

/// All cfg.trials trials on `workers` threads (0 = hardware concurrency).
/// The result is identical for every worker count.
FrequencyMap run_trials(const ExperimentConfig& cfg, unsigned workers = 0);
FrequencyMap run_trials(const ExperimentConfig& cfg, const cipher::Kuznyechik& cipher,
                        std::uint64_t first, std::uint64_t n, unsigned workers);

unsigned resolve_workers(unsigned requested) noexcept;

}  // namespace kcd::sampler
