#include "kcd/sampler.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <regex>
#include <stdexcept>
#include <thread>

#include "kcd/gf256.hpp"
#include "kcd/rng.hpp"

namespace kcd::sampler {
namespace {

State random_state(SplitMix64& g) noexcept {
    const std::uint64_t w[2] = {g(), g()};
    State s;
    std::memcpy(s.bytes.data(), w, sizeof w);
    return s;
}

std::vector<int> parse_index_list(std::string_view list, std::string_view what) {
    std::vector<int> out;
    std::size_t i = 0;
    while (i <= list.size()) {
        std::size_t j = list.find(',', i);
        if (j == std::string_view::npos) j = list.size();
        std::string_view tok = list.substr(i, j - i);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        if (!tok.empty()) {
            int v = -1;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
                throw std::invalid_argument(std::string(what) + ": bad nibble index '" + std::string(tok) + "'");
            }
            out.push_back(v);
        }
        i = j + 1;
    }
    return out;
}

}  // namespace

int nibble_byte(int nibble) noexcept { return 15 - nibble / 2; }

NibbleMask NibbleMask::from_indices(std::span<const int> indices) {
    std::uint32_t bits = 0;
    for (int k : indices) {
        if (k < 0 || k >= 32) throw std::invalid_argument("nibble index out of range [0, 31]: " + std::to_string(k));
        bits |= 1u << k;
    }
    return NibbleMask(bits);
}

NibbleMask NibbleMask::experiment_byte(int k) {
    if (k < 0 || k >= 16) throw std::invalid_argument("byte index out of range [0, 15]: " + std::to_string(k));
    return NibbleMask(3u << (2 * k));
}

int NibbleMask::count() const noexcept { return std::popcount(bits_); }

std::vector<int> NibbleMask::indices() const {
    std::vector<int> out;
    for (int k = 0; k < 32; ++k)
        if (contains(k)) out.push_back(k);
    return out;
}

State NibbleMask::and_mask() const noexcept {
    State m;
    for (int k = 0; k < 32; ++k) {
        if (!contains(k)) continue;
        m[static_cast<std::size_t>(nibble_byte(k))] |= (k % 2 == 0) ? 0xF0 : 0x0F;
    }
    return m;
}

std::bitset<16> NibbleMask::active_bytes() const noexcept {
    std::bitset<16> out;
    for (int k = 0; k < 32; ++k)
        if (contains(k)) out.set(static_cast<std::size_t>(nibble_byte(k)));
    return out;
}

MaskConfig byte_mask(int in_byte, int out_byte) {
    return MaskConfig{"byte_" + std::to_string(in_byte) + "_in->byte_" + std::to_string(out_byte) + "_out",
                      NibbleMask::experiment_byte(in_byte), NibbleMask::experiment_byte(out_byte)};
}

MaskConfig parse_mask(std::string_view spec) {
    static const std::regex kNamed(R"(byte_(\d+)_in->byte_(\d+)_out)");
    const std::string s(spec);
    std::smatch m;
    if (std::regex_match(s, m, kNamed)) {
        auto cfg = byte_mask(std::stoi(m[1].str()), std::stoi(m[2].str()));
        validate(cfg);
        return cfg;
    }
    const auto semi = spec.find(';');
    if (semi == std::string_view::npos || spec.substr(0, 3) != "in=" || spec.substr(semi + 1, 4) != "out=") {
        throw std::invalid_argument("mask must be 'byte_<i>_in->byte_<j>_out' or 'in=<list>;out=<list>', got '" + s +
                                    "'");
    }
    const auto in = parse_index_list(spec.substr(3, semi - 3), "mask input");
    const auto out = parse_index_list(spec.substr(semi + 5), "mask output");
    MaskConfig cfg{s, NibbleMask::from_indices(in), NibbleMask::from_indices(out)};
    validate(cfg);
    return cfg;
}

std::vector<MaskConfig> default_masks() {
    std::vector<MaskConfig> out;
    for (int k = 0; k <= 14; k += 2) out.push_back(byte_mask(k, k));
    out.push_back(byte_mask(0, 1));
    out.push_back(byte_mask(2, 3));
    out.push_back(byte_mask(4, 5));
    out.push_back(byte_mask(14, 15));
    return out;
}

void validate(const MaskConfig& m) {
    if (m.input.empty()) throw std::invalid_argument("mask '" + m.name + "' has an empty input nibble set");
}

State project(const State& s, const NibbleMask& m) noexcept { return s & m.and_mask(); }

bool pattern_match(const State& delta, const std::bitset<16>& active) noexcept {
    for (std::size_t i = 0; i < 16; ++i)
        if (active.test(i) && delta[i] == 0) return false;
    return true;
}

State multiply_state(const State& c_vector, const State& x) noexcept {
    const auto& t = gf256::mul_table();
    State out;
    for (std::size_t i = 0; i < 16; ++i) out[i] = t[c_vector[i]][x[i]];
    return out;
}

State broadcast_c(std::uint8_t c) noexcept {
    State s;
    s.bytes.fill(c);
    return s;
}

State masked_c(std::uint8_t c, const NibbleMask& input) noexcept {
    State s = broadcast_c(1);
    const auto active = input.active_bytes();
    for (std::size_t i = 0; i < 16; ++i)
        if (active.test(i)) s[i] = c;
    return s;
}

void validate(const ExperimentConfig& cfg) {
    cipher::validate_rounds(cfg.rounds);
    validate(cfg.masks);
    if (cfg.trials == 0) throw std::invalid_argument("trial count must be positive");
}

std::size_t PairKeyHash::operator()(const PairKey& k) const noexcept {
    std::uint64_t w[4];
    std::memcpy(w, k.a.bytes.data(), 16);
    std::memcpy(w + 2, k.b.bytes.data(), 16);
    std::uint64_t h = mix64(w[0] ^ 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ w[1]);
    h = mix64(h ^ w[2]);
    h = mix64(h ^ w[3]);
    return static_cast<std::size_t>(h);
}

std::uint64_t FrequencyMap::total_count() const noexcept {
    std::uint64_t s = 0;
    for (const auto& [k, v] : counts) s += v;
    return s;
}

std::uint64_t FrequencyMap::count(const State& a, const State& b) const noexcept {
    auto it = counts.find(PairKey{a, b});
    return it == counts.end() ? 0 : it->second;
}

std::vector<std::pair<PairKey, std::uint64_t>> FrequencyMap::sorted() const {
    std::vector<std::pair<PairKey, std::uint64_t>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return v;
}

void merge_into(FrequencyMap& dst, const FrequencyMap& src) {
    for (const auto& [k, v] : src.counts) dst.counts[k] += v;
    dst.trials_used += src.trials_used;
    dst.trials_skipped += src.trials_skipped;
    dst.pattern_matches += src.pattern_matches;
}

FrequencyMap merge(std::span<const FrequencyMap> maps) {
    FrequencyMap out;
    for (const auto& m : maps) merge_into(out, m);
    return out;
}

FrequencyMap run_trial_range(const ExperimentConfig& cfg, const cipher::Kuznyechik& cipher, std::uint64_t first,
                             std::uint64_t n) {
    const State in_mask = cfg.masks.input.and_mask();
    const State out_mask = cfg.masks.output.and_mask();
    const auto out_bytes = cfg.masks.output.active_bytes();
    const int rounds = cfg.rounds;

    FrequencyMap fm;
    for (std::uint64_t t = first; t < first + n; ++t) {
        SplitMix64 g = SplitMix64::substream(cfg.seed, t);
        const State x = random_state(g);
        State a_rand;
        do {
            a_rand = random_state(g);
        } while (a_rand.is_zero());

        const State a = a_rand & in_mask;
        if (a.is_zero()) {
            ++fm.trials_skipped;
            continue;
        }
        const State x_pair = multiply_state(cfg.c_vector, x) ^ a;
        const State b_full = cipher.encrypt_unchecked(x, rounds) ^ cipher.encrypt_unchecked(x_pair, rounds);
        if (pattern_match(b_full, out_bytes)) ++fm.pattern_matches;
        ++fm.counts[PairKey{a, b_full & out_mask}];
        ++fm.trials_used;
    }
    return fm;
}

unsigned resolve_workers(unsigned requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

FrequencyMap run_trials(const ExperimentConfig& cfg, const cipher::Kuznyechik& cipher, std::uint64_t first,
                        std::uint64_t n, unsigned workers) {
    workers = resolve_workers(workers);
    const std::uint64_t batches = (n + kBatchSize - 1) / kBatchSize;
    if (workers <= 1 || batches <= 1) return run_trial_range(cfg, cipher, first, n);
    if (workers > batches) workers = static_cast<unsigned>(batches);

    std::vector<FrequencyMap> shards(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        // contiguous block of whole batches per worker
        const std::uint64_t b0 = batches * w / workers;
        const std::uint64_t b1 = batches * (w + 1) / workers;
        const std::uint64_t t0 = first + b0 * kBatchSize;
        const std::uint64_t t1 = std::min(first + n, first + b1 * kBatchSize);
        threads.emplace_back([&, w, t0, t1] { shards[w] = run_trial_range(cfg, cipher, t0, t1 - t0); });
    }
    for (auto& t : threads) t.join();

    FrequencyMap out = std::move(shards[0]);
    for (unsigned w = 1; w < workers; ++w) merge_into(out, shards[w]);
    return out;
}

FrequencyMap run_trials(const ExperimentConfig& cfg, unsigned workers) {
    validate(cfg);
    const cipher::Kuznyechik cipher(cfg.master_key);
    return run_trials(cfg, cipher, 0, cfg.trials, workers);
}

}  // namespace kcd::sampler
