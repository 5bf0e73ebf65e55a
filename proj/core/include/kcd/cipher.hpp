#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "kcd/state.hpp"

// Kuznyechik (GOST R 34.12-2015, RFC 7801) with a rounds parameter for
// reduced-round analysis.
namespace kcd::cipher {

inline constexpr int kFullRounds = 9;
inline constexpr std::size_t kRoundKeyCount = 10;
inline constexpr std::size_t kConstantCount = 32;

using SBox = std::array<std::uint8_t, 256>;

const SBox& sbox_table() noexcept;
const SBox& sbox_inv_table() noexcept;

inline std::uint8_t sbox(std::uint8_t x) noexcept { return sbox_table()[x]; }
inline std::uint8_t sbox_inv(std::uint8_t x) noexcept { return sbox_inv_table()[x]; }

State apply_sbox(const State& s) noexcept;
State apply_sbox_inv(const State& s) noexcept;

/// Coefficients of the R feedback byte, indexed by State byte (byte 0 leftmost).
inline constexpr std::array<std::uint8_t, 16> kLinearCoefficients = {
    0x94, 0x20, 0x85, 0x10, 0xC2, 0xC0, 0x01, 0xFB,
    0x01, 0xC0, 0xC2, 0x10, 0x85, 0x20, 0x94, 0x01};

/// One step of the LFSR: bytes move one position right and byte 0 receives
/// the GF(2^8) dot product of the input with kLinearCoefficients.
State r_transform(const State& s) noexcept;
State r_inv(const State& s) noexcept;

/// L = R^16 by direct composition. Slow; used to build and check the tables.
State linear_l_composed(const State& s) noexcept;
State linear_l_inv_composed(const State& s) noexcept;

/// forward[i][v] = L(state with v at byte i, zeros elsewhere); likewise for
/// the inverse. L(s) is the XOR of forward[i][s_i] over all i.
struct LTables {
    std::array<std::array<State, 256>, 16> forward;
    std::array<std::array<State, 256>, 16> inverse;
};

LTables build_l_tables();
const LTables& l_tables();

State linear_l(const State& s) noexcept;
State linear_l_inv(const State& s) noexcept;

/// C_j = L(Vec(j)) for j = 1..32, Vec(j) holding j in the least significant
/// (rightmost) byte. Element 0 is C_1.
std::array<State, kConstantCount> derive_constants();

using RoundKeySet = std::array<State, kRoundKeyCount>;

RoundKeySet key_schedule(const MasterKey& key);
/// Throws std::invalid_argument unless key.size() == 32.
RoundKeySet key_schedule(std::span<const std::uint8_t> key);

/// rounds iterations of (X[K_i], S, L) followed by X[K_rounds]. rounds == 9 is
/// the standard cipher. Throws std::out_of_range outside [1, 9].
State encrypt(const State& plaintext, const RoundKeySet& keys, int rounds = kFullRounds);
State decrypt(const State& ciphertext, const RoundKeySet& keys, int rounds = kFullRounds);

/// Expanded key plus the fused S+L tables used on the hot path.
class Kuznyechik {
public:
    explicit Kuznyechik(const MasterKey& key);
    explicit Kuznyechik(const RoundKeySet& keys);

    const RoundKeySet& round_keys() const noexcept { return keys_; }

    State encrypt(const State& plaintext, int rounds = kFullRounds) const;
    State decrypt(const State& ciphertext, int rounds = kFullRounds) const;

    /// No range check; callers validate rounds once up front.
    State encrypt_unchecked(const State& plaintext, int rounds) const noexcept;

private:
    RoundKeySet keys_;
};

void validate_rounds(int rounds);

}  // namespace kcd::cipher
