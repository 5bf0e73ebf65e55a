#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace kcd {

/// A 128-bit Kuznyechik block as 16 field elements. Byte 0 is the leftmost
/// (most significant) byte of the 32-character hex rendering, matching the
/// RFC 7801 vector layout.
struct State {
    static constexpr std::size_t kSize = 16;
    std::array<std::uint8_t, kSize> bytes{};

    constexpr std::uint8_t& operator[](std::size_t i) noexcept { return bytes[i]; }
    constexpr std::uint8_t operator[](std::size_t i) const noexcept { return bytes[i]; }

    bool is_zero() const noexcept {
        std::uint64_t w[2];
        std::memcpy(w, bytes.data(), sizeof w);
        return (w[0] | w[1]) == 0;
    }

    State& operator^=(const State& o) noexcept {
        std::uint64_t a[2], b[2];
        std::memcpy(a, bytes.data(), sizeof a);
        std::memcpy(b, o.bytes.data(), sizeof b);
        a[0] ^= b[0];
        a[1] ^= b[1];
        std::memcpy(bytes.data(), a, sizeof a);
        return *this;
    }
    State& operator&=(const State& o) noexcept {
        std::uint64_t a[2], b[2];
        std::memcpy(a, bytes.data(), sizeof a);
        std::memcpy(b, o.bytes.data(), sizeof b);
        a[0] &= b[0];
        a[1] &= b[1];
        std::memcpy(bytes.data(), a, sizeof a);
        return *this;
    }
    friend State operator^(State a, const State& b) noexcept { return a ^= b; }
    friend State operator&(State a, const State& b) noexcept { return a &= b; }

    friend bool operator==(const State&, const State&) = default;
    friend auto operator<=>(const State&, const State&) = default;

    /// 32 lowercase hex characters, byte 0 first.
    std::string to_hex() const;
    /// Accepts 32 hex characters with an optional "0x" prefix. Throws
    /// std::invalid_argument naming the offending position.
    static State from_hex(std::string_view hex);
};

/// 256-bit master key K_1 || K_0; bytes [0,16) are K_1.
struct MasterKey {
    static constexpr std::size_t kSize = 32;
    std::array<std::uint8_t, kSize> bytes{};

    State high() const noexcept;
    State low() const noexcept;

    friend bool operator==(const MasterKey&, const MasterKey&) = default;

    std::string to_hex() const;
    static MasterKey from_hex(std::string_view hex);
};

namespace detail {
/// Decode exactly `out_len` bytes of hex; `what` labels errors.
void decode_hex(std::string_view hex, std::uint8_t* out, std::size_t out_len, std::string_view what);
std::string encode_hex(const std::uint8_t* in, std::size_t len);
}  // namespace detail

}  // namespace kcd
