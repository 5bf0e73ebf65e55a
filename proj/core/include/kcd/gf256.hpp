#pragma once

#include <array>
#include <cstdint>

namespace kcd::gf256 {

// Field GF(2^8) with reduction polynomial x^8 + x^7 + x^6 + x + 1. This is the
// Kuznyechik field, not the AES one (0x11B).
inline constexpr std::uint16_t kPolynomial = 0x1C3;

using MulTable = std::array<std::array<std::uint8_t, 256>, 256>;

/// Shift-and-reduce multiplication. Used to build the table; hot paths should
/// go through mul() instead.
constexpr std::uint8_t mul_slow(std::uint8_t a, std::uint8_t b) noexcept {
    std::uint16_t acc = 0;
    std::uint16_t x = a;
    for (std::uint8_t y = b; y != 0; y >>= 1) {
        if (y & 1u) acc ^= x;
        x <<= 1;
        if (x & 0x100u) x ^= kPolynomial;
    }
    return static_cast<std::uint8_t>(acc);
}

MulTable build_mul_table();

/// Process-wide table, built on first use and immutable afterwards.
const MulTable& mul_table();

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept {
    return mul_table()[a][b];
}

constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) noexcept {
    return static_cast<std::uint8_t>(a ^ b);
}

/// Multiplicative inverse; inv(0) is defined as 0.
std::uint8_t inv(std::uint8_t a) noexcept;

}  // namespace kcd::gf256
