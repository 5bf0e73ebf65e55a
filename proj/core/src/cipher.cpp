#include "kcd/cipher.hpp"

#include <stdexcept>
#include <string>

#include "kcd/gf256.hpp"

namespace kcd::cipher {
namespace {

constexpr SBox kSBox = {
    0xfc, 0xee, 0xdd, 0x11, 0xcf, 0x6e, 0x31, 0x16, 0xfb, 0xc4, 0xfa, 0xda, 0x23, 0xc5, 0x04, 0x4d,
    0xe9, 0x77, 0xf0, 0xdb, 0x93, 0x2e, 0x99, 0xba, 0x17, 0x36, 0xf1, 0xbb, 0x14, 0xcd, 0x5f, 0xc1,
    0xf9, 0x18, 0x65, 0x5a, 0xe2, 0x5c, 0xef, 0x21, 0x81, 0x1c, 0x3c, 0x42, 0x8b, 0x01, 0x8e, 0x4f,
    0x05, 0x84, 0x02, 0xae, 0xe3, 0x6a, 0x8f, 0xa0, 0x06, 0x0b, 0xed, 0x98, 0x7f, 0xd4, 0xd3, 0x1f,
    0xeb, 0x34, 0x2c, 0x51, 0xea, 0xc8, 0x48, 0xab, 0xf2, 0x2a, 0x68, 0xa2, 0xfd, 0x3a, 0xce, 0xcc,
    0xb5, 0x70, 0x0e, 0x56, 0x08, 0x0c, 0x76, 0x12, 0xbf, 0x72, 0x13, 0x47, 0x9c, 0xb7, 0x5d, 0x87,
    0x15, 0xa1, 0x96, 0x29, 0x10, 0x7b, 0x9a, 0xc7, 0xf3, 0x91, 0x78, 0x6f, 0x9d, 0x9e, 0xb2, 0xb1,
    0x32, 0x75, 0x19, 0x3d, 0xff, 0x35, 0x8a, 0x7e, 0x6d, 0x54, 0xc6, 0x80, 0xc3, 0xbd, 0x0d, 0x57,
    0xdf, 0xf5, 0x24, 0xa9, 0x3e, 0xa8, 0x43, 0xc9, 0xd7, 0x79, 0xd6, 0xf6, 0x7c, 0x22, 0xb9, 0x03,
    0xe0, 0x0f, 0xec, 0xde, 0x7a, 0x94, 0xb0, 0xbc, 0xdc, 0xe8, 0x28, 0x50, 0x4e, 0x33, 0x0a, 0x4a,
    0xa7, 0x97, 0x60, 0x73, 0x1e, 0x00, 0x62, 0x44, 0x1a, 0xb8, 0x38, 0x82, 0x64, 0x9f, 0x26, 0x41,
    0xad, 0x45, 0x46, 0x92, 0x27, 0x5e, 0x55, 0x2f, 0x8c, 0xa3, 0xa5, 0x7d, 0x69, 0xd5, 0x95, 0x3b,
    0x07, 0x58, 0xb3, 0x40, 0x86, 0xac, 0x1d, 0xf7, 0x30, 0x37, 0x6b, 0xe4, 0x88, 0xd9, 0xe7, 0x89,
    0xe1, 0x1b, 0x83, 0x49, 0x4c, 0x3f, 0xf8, 0xfe, 0x8d, 0x53, 0xaa, 0x90, 0xca, 0xd8, 0x85, 0x61,
    0x20, 0x71, 0x67, 0xa4, 0x2d, 0x2b, 0x09, 0x5b, 0xcb, 0x9b, 0x25, 0xd0, 0xbe, 0xe5, 0x6c, 0x52,
    0x59, 0xa6, 0x74, 0xd2, 0xe6, 0xf4, 0xb4, 0xc0, 0xd1, 0x66, 0xaf, 0xc2, 0x39, 0x4b, 0x63, 0xb6,
};

constexpr SBox kSBoxInv = {
    0xa5, 0x2d, 0x32, 0x8f, 0x0e, 0x30, 0x38, 0xc0, 0x54, 0xe6, 0x9e, 0x39, 0x55, 0x7e, 0x52, 0x91,
    0x64, 0x03, 0x57, 0x5a, 0x1c, 0x60, 0x07, 0x18, 0x21, 0x72, 0xa8, 0xd1, 0x29, 0xc6, 0xa4, 0x3f,
    0xe0, 0x27, 0x8d, 0x0c, 0x82, 0xea, 0xae, 0xb4, 0x9a, 0x63, 0x49, 0xe5, 0x42, 0xe4, 0x15, 0xb7,
    0xc8, 0x06, 0x70, 0x9d, 0x41, 0x75, 0x19, 0xc9, 0xaa, 0xfc, 0x4d, 0xbf, 0x2a, 0x73, 0x84, 0xd5,
    0xc3, 0xaf, 0x2b, 0x86, 0xa7, 0xb1, 0xb2, 0x5b, 0x46, 0xd3, 0x9f, 0xfd, 0xd4, 0x0f, 0x9c, 0x2f,
    0x9b, 0x43, 0xef, 0xd9, 0x79, 0xb6, 0x53, 0x7f, 0xc1, 0xf0, 0x23, 0xe7, 0x25, 0x5e, 0xb5, 0x1e,
    0xa2, 0xdf, 0xa6, 0xfe, 0xac, 0x22, 0xf9, 0xe2, 0x4a, 0xbc, 0x35, 0xca, 0xee, 0x78, 0x05, 0x6b,
    0x51, 0xe1, 0x59, 0xa3, 0xf2, 0x71, 0x56, 0x11, 0x6a, 0x89, 0x94, 0x65, 0x8c, 0xbb, 0x77, 0x3c,
    0x7b, 0x28, 0xab, 0xd2, 0x31, 0xde, 0xc4, 0x5f, 0xcc, 0xcf, 0x76, 0x2c, 0xb8, 0xd8, 0x2e, 0x36,
    0xdb, 0x69, 0xb3, 0x14, 0x95, 0xbe, 0x62, 0xa1, 0x3b, 0x16, 0x66, 0xe9, 0x5c, 0x6c, 0x6d, 0xad,
    0x37, 0x61, 0x4b, 0xb9, 0xe3, 0xba, 0xf1, 0xa0, 0x85, 0x83, 0xda, 0x47, 0xc5, 0xb0, 0x33, 0xfa,
    0x96, 0x6f, 0x6e, 0xc2, 0xf6, 0x50, 0xff, 0x5d, 0xa9, 0x8e, 0x17, 0x1b, 0x97, 0x7d, 0xec, 0x58,
    0xf7, 0x1f, 0xfb, 0x7c, 0x09, 0x0d, 0x7a, 0x67, 0x45, 0x87, 0xdc, 0xe8, 0x4f, 0x1d, 0x4e, 0x04,
    0xeb, 0xf8, 0xf3, 0x3e, 0x3d, 0xbd, 0x8a, 0x88, 0xdd, 0xcd, 0x0b, 0x13, 0x98, 0x02, 0x93, 0x80,
    0x90, 0xd0, 0x24, 0x34, 0xcb, 0xed, 0xf4, 0xce, 0x99, 0x10, 0x44, 0x40, 0x92, 0x3a, 0x01, 0x26,
    0x12, 0x1a, 0x48, 0x68, 0xf5, 0x81, 0x8b, 0xc7, 0xd6, 0x20, 0x0a, 0x08, 0x00, 0x4c, 0xd7, 0x74,
};

inline void xor_into(State& dst, const State& src) noexcept { dst ^= src; }

// fused[i][v] = L(S(v) placed at byte i)
using FusedTable = std::array<std::array<State, 256>, 16>;

const FusedTable& fused_sl_table() {
    static const FusedTable table = [] {
        FusedTable t{};
        const auto& l = l_tables();
        for (std::size_t i = 0; i < 16; ++i) {
            for (unsigned v = 0; v < 256; ++v) t[i][v] = l.forward[i][kSBox[v]];
        }
        return t;
    }();
    return table;
}

}  // namespace

const SBox& sbox_table() noexcept { return kSBox; }
const SBox& sbox_inv_table() noexcept { return kSBoxInv; }

State apply_sbox(const State& s) noexcept {
    State out;
    for (std::size_t i = 0; i < State::kSize; ++i) out[i] = kSBox[s[i]];
    return out;
}

State apply_sbox_inv(const State& s) noexcept {
    State out;
    for (std::size_t i = 0; i < State::kSize; ++i) out[i] = kSBoxInv[s[i]];
    return out;
}

State r_transform(const State& s) noexcept {
    std::uint8_t feedback = 0;
    for (std::size_t i = 0; i < 16; ++i) feedback ^= gf256::mul(kLinearCoefficients[i], s[i]);
    State out;
    out[0] = feedback;
    for (std::size_t i = 1; i < 16; ++i) out[i] = s[i - 1];
    return out;
}

State r_inv(const State& s) noexcept {
    State out;
    for (std::size_t i = 0; i < 15; ++i) out[i] = s[i + 1];
    // kLinearCoefficients[15] == 1, so the dropped byte is recovered by
    // cancelling the other 15 terms out of the feedback byte.
    std::uint8_t last = s[0];
    for (std::size_t i = 0; i < 15; ++i) last ^= gf256::mul(kLinearCoefficients[i], out[i]);
    out[15] = last;
    return out;
}

State linear_l_composed(const State& s) noexcept {
    State x = s;
    for (int i = 0; i < 16; ++i) x = r_transform(x);
    return x;
}

State linear_l_inv_composed(const State& s) noexcept {
    State x = s;
    for (int i = 0; i < 16; ++i) x = r_inv(x);
    return x;
}

LTables build_l_tables() {
    LTables t{};
    for (std::size_t i = 0; i < 16; ++i) {
        for (unsigned v = 0; v < 256; ++v) {
            State e;
            e[i] = static_cast<std::uint8_t>(v);
            t.forward[i][v] = linear_l_composed(e);
            t.inverse[i][v] = linear_l_inv_composed(e);
        }
    }
    return t;
}

const LTables& l_tables() {
    static const LTables tables = build_l_tables();
    return tables;
}

State linear_l(const State& s) noexcept {
    const auto& t = l_tables().forward;
    State out;
    for (std::size_t i = 0; i < 16; ++i) xor_into(out, t[i][s[i]]);
    return out;
}

State linear_l_inv(const State& s) noexcept {
    const auto& t = l_tables().inverse;
    State out;
    for (std::size_t i = 0; i < 16; ++i) xor_into(out, t[i][s[i]]);
    return out;
}

std::array<State, kConstantCount> derive_constants() {
    std::array<State, kConstantCount> c{};
    for (std::size_t j = 1; j <= kConstantCount; ++j) {
        State v;
        v[15] = static_cast<std::uint8_t>(j);
        c[j - 1] = linear_l(v);
    }
    return c;
}

RoundKeySet key_schedule(const MasterKey& key) {
    static const auto constants = derive_constants();
    RoundKeySet keys{};
    State a1 = key.high();
    State a0 = key.low();
    keys[0] = a1;
    keys[1] = a0;
    for (std::size_t pair = 0; pair < 4; ++pair) {
        for (std::size_t step = 0; step < 8; ++step) {
            // F_C(a1, a0) = (L(S(a1 ^ C)) ^ a0, a1)
            State t = linear_l(apply_sbox(a1 ^ constants[8 * pair + step]));
            t ^= a0;
            a0 = a1;
            a1 = t;
        }
        keys[2 * pair + 2] = a1;
        keys[2 * pair + 3] = a0;
    }
    return keys;
}

RoundKeySet key_schedule(std::span<const std::uint8_t> key) {
    if (key.size() != MasterKey::kSize) {
        throw std::invalid_argument("master key must be 32 bytes, got " + std::to_string(key.size()));
    }
    MasterKey mk;
    std::copy(key.begin(), key.end(), mk.bytes.begin());
    return key_schedule(mk);
}

void validate_rounds(int rounds) {
    if (rounds < 1 || rounds > kFullRounds) {
        throw std::out_of_range("rounds must be in [1, 9], got " + std::to_string(rounds));
    }
}

State encrypt(const State& plaintext, const RoundKeySet& keys, int rounds) {
    validate_rounds(rounds);
    State x = plaintext;
    for (int i = 0; i < rounds; ++i) {
        x ^= keys[static_cast<std::size_t>(i)];
        x = linear_l(apply_sbox(x));
    }
    x ^= keys[static_cast<std::size_t>(rounds)];
    return x;
}

State decrypt(const State& ciphertext, const RoundKeySet& keys, int rounds) {
    validate_rounds(rounds);
    State x = ciphertext;
    x ^= keys[static_cast<std::size_t>(rounds)];
    for (int i = rounds - 1; i >= 0; --i) {
        x = apply_sbox_inv(linear_l_inv(x));
        x ^= keys[static_cast<std::size_t>(i)];
    }
    return x;
}

Kuznyechik::Kuznyechik(const MasterKey& key) : keys_(key_schedule(key)) {}

Kuznyechik::Kuznyechik(const RoundKeySet& keys) : keys_(keys) {}

State Kuznyechik::encrypt(const State& plaintext, int rounds) const {
    validate_rounds(rounds);
    return encrypt_unchecked(plaintext, rounds);
}

State Kuznyechik::encrypt_unchecked(const State& plaintext, int rounds) const noexcept {
    const auto& t = fused_sl_table();
    State x = plaintext;
    for (int r = 0; r < rounds; ++r) {
        x ^= keys_[static_cast<std::size_t>(r)];
        State y;
        for (std::size_t i = 0; i < 16; ++i) y ^= t[i][x[i]];
        x = y;
    }
    x ^= keys_[static_cast<std::size_t>(rounds)];
    return x;
}

State Kuznyechik::decrypt(const State& ciphertext, int rounds) const {
    return cipher::decrypt(ciphertext, keys_, rounds);
}

}  // namespace kcd::cipher
