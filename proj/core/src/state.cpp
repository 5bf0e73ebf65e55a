#include "kcd/state.hpp"

#include <stdexcept>

namespace kcd {
namespace detail {

namespace {
int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

void decode_hex(std::string_view hex, std::uint8_t* out, std::size_t out_len, std::string_view what) {
    std::size_t offset = 0;
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
        hex.remove_prefix(2);
        offset = 2;
    }
    if (hex.size() != 2 * out_len) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(2 * out_len) +
                                    " hex characters, got " + std::to_string(hex.size()));
    }
    for (std::size_t i = 0; i < out_len; ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            const std::size_t bad = offset + 2 * i + (hi < 0 ? 0 : 1);
            throw std::invalid_argument(std::string(what) + ": invalid hex character at position " +
                                        std::to_string(bad));
        }
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
}

std::string encode_hex(const std::uint8_t* in, std::size_t len) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(2 * len, '0');
    for (std::size_t i = 0; i < len; ++i) {
        s[2 * i] = kDigits[in[i] >> 4];
        s[2 * i + 1] = kDigits[in[i] & 0x0F];
    }
    return s;
}

}  // namespace detail

std::string State::to_hex() const { return detail::encode_hex(bytes.data(), kSize); }

State State::from_hex(std::string_view hex) {
    State s;
    detail::decode_hex(hex, s.bytes.data(), kSize, "block");
    return s;
}

State MasterKey::high() const noexcept {
    State s;
    std::memcpy(s.bytes.data(), bytes.data(), State::kSize);
    return s;
}

State MasterKey::low() const noexcept {
    State s;
    std::memcpy(s.bytes.data(), bytes.data() + State::kSize, State::kSize);
    return s;
}

std::string MasterKey::to_hex() const { return detail::encode_hex(bytes.data(), kSize); }

MasterKey MasterKey::from_hex(std::string_view hex) {
    MasterKey k;
    detail::decode_hex(hex, k.bytes.data(), kSize, "key");
    return k;
}

}  // namespace kcd
