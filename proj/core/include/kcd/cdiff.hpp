#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Exhaustive c-differential tables for 8-bit permutations.
//
//   outer:  counts[a][b] = #{x : F(x ^ a) ^ c*F(x) == b}
//   inner:  counts[a][b] = #{x : F(c*x ^ a) ^ F(x) == b}
//
// For a permutation F, outer(F, c)[a][b] == inner(F^-1, c)[b][a].
namespace kcd::cdiff {

using Permutation = std::array<std::uint8_t, 256>;

enum class Orientation { inner, outer };

std::string_view to_string(Orientation o) noexcept;
Orientation orientation_from_string(std::string_view s);

struct CDiffTable {
    Orientation orientation = Orientation::inner;
    std::uint8_t c = 1;
    std::vector<std::uint16_t> counts = std::vector<std::uint16_t>(256 * 256, 0);

    std::uint16_t at(unsigned a, unsigned b) const noexcept { return counts[a * 256 + b]; }
    std::span<const std::uint16_t> row(unsigned a) const noexcept {
        return {counts.data() + a * 256, 256};
    }
};

/// delta for c = 1..255; index 0 is unused and left at 0.
struct UniformitySpectrum {
    Orientation orientation = Orientation::inner;
    std::array<unsigned, 256> per_c{};

    unsigned operator[](std::uint8_t c) const noexcept { return per_c[c]; }
    unsigned max() const noexcept;
};

bool is_permutation(std::span<const std::uint8_t> f) noexcept;
/// Throws std::invalid_argument if f is not a bijection on [0, 255].
void require_permutation(std::span<const std::uint8_t> f);
Permutation invert(const Permutation& f);

CDiffTable outer_cddt(const Permutation& f, std::uint8_t c);
CDiffTable inner_cddt(const Permutation& f, std::uint8_t c);
CDiffTable cddt(const Permutation& f, std::uint8_t c, Orientation o);

/// Max entry, skipping row a = 0 when c = 1 (that row is the trivial
/// counts[0][0] == 256).
unsigned c_uniformity(const CDiffTable& t) noexcept;

UniformitySpectrum full_spectrum(const Permutation& f, Orientation o);

/// Duality check: for every c in [1,255] and every (a,b),
/// outer(F,c)[a][b] == inner(F^-1,c)[b][a].
bool verify_duality(const Permutation& f);

/// 256 whitespace/comma separated values, decimal or 0x-prefixed hex. Throws
/// if the count is wrong, a value is out of range, or the map is not a bijection.
Permutation parse_permutation(std::string_view text);

}  // namespace kcd::cdiff
