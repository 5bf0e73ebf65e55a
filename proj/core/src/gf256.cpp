#include "kcd/gf256.hpp"

namespace kcd::gf256 {

MulTable build_mul_table() {
    MulTable table{};
    for (unsigned a = 0; a < 256; ++a) {
        for (unsigned b = a; b < 256; ++b) {
            const auto p = mul_slow(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b));
            table[a][b] = p;
            table[b][a] = p;
        }
    }
    return table;
}

const MulTable& mul_table() {
    static const MulTable table = build_mul_table();
    return table;
}

std::uint8_t inv(std::uint8_t a) noexcept {
    static const std::array<std::uint8_t, 256> inverses = [] {
        std::array<std::uint8_t, 256> out{};
        const auto& t = mul_table();
        for (unsigned x = 1; x < 256; ++x) {
            for (unsigned y = 1; y < 256; ++y) {
                if (t[x][y] == 1) {
                    out[x] = static_cast<std::uint8_t>(y);
                    break;
                }
            }
        }
        return out;
    }();
    return inverses[a];
}

}  // namespace kcd::gf256
