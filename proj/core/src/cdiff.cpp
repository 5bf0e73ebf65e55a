#include "kcd/cdiff.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>

#include "kcd/gf256.hpp"

namespace kcd::cdiff {

std::string_view to_string(Orientation o) noexcept {
    return o == Orientation::inner ? "inner" : "outer";
}

Orientation orientation_from_string(std::string_view s) {
    if (s == "inner") return Orientation::inner;
    if (s == "outer") return Orientation::outer;
    throw std::invalid_argument("orientation must be 'inner' or 'outer', got '" + std::string(s) + "'");
}

unsigned UniformitySpectrum::max() const noexcept {
    return *std::max_element(per_c.begin() + 1, per_c.end());
}

bool is_permutation(std::span<const std::uint8_t> f) noexcept {
    if (f.size() != 256) return false;
    std::array<bool, 256> seen{};
    for (auto v : f) {
        if (seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

void require_permutation(std::span<const std::uint8_t> f) {
    if (!is_permutation(f)) throw std::invalid_argument("function is not a permutation of [0, 255]");
}

Permutation invert(const Permutation& f) {
    require_permutation(f);
    Permutation g{};
    for (unsigned x = 0; x < 256; ++x) g[f[x]] = static_cast<std::uint8_t>(x);
    return g;
}

CDiffTable outer_cddt(const Permutation& f, std::uint8_t c) {
    require_permutation(f);
    const auto& mul_c = gf256::mul_table()[c];
    CDiffTable t;
    t.orientation = Orientation::outer;
    t.c = c;
    for (unsigned a = 0; a < 256; ++a) {
        auto* row = t.counts.data() + a * 256;
        for (unsigned x = 0; x < 256; ++x) ++row[f[x ^ a] ^ mul_c[f[x]]];
    }
    return t;
}

CDiffTable inner_cddt(const Permutation& f, std::uint8_t c) {
    require_permutation(f);
    const auto& mul_c = gf256::mul_table()[c];
    CDiffTable t;
    t.orientation = Orientation::inner;
    t.c = c;
    for (unsigned a = 0; a < 256; ++a) {
        auto* row = t.counts.data() + a * 256;
        for (unsigned x = 0; x < 256; ++x) ++row[f[mul_c[x] ^ a] ^ f[x]];
    }
    return t;
}

CDiffTable cddt(const Permutation& f, std::uint8_t c, Orientation o) {
    return o == Orientation::inner ? inner_cddt(f, c) : outer_cddt(f, c);
}

unsigned c_uniformity(const CDiffTable& t) noexcept {
    const unsigned first_row = t.c == 1 ? 1u : 0u;
    unsigned best = 0;
    for (unsigned i = first_row * 256; i < t.counts.size(); ++i) best = std::max<unsigned>(best, t.counts[i]);
    return best;
}

UniformitySpectrum full_spectrum(const Permutation& f, Orientation o) {
    require_permutation(f);
    UniformitySpectrum s;
    s.orientation = o;
    for (unsigned c = 1; c < 256; ++c) s.per_c[c] = c_uniformity(cddt(f, static_cast<std::uint8_t>(c), o));
    return s;
}

bool verify_duality(const Permutation& f) {
    const Permutation g = invert(f);
    for (unsigned c = 1; c < 256; ++c) {
        const auto outer = outer_cddt(f, static_cast<std::uint8_t>(c));
        const auto inner = inner_cddt(g, static_cast<std::uint8_t>(c));
        for (unsigned a = 0; a < 256; ++a) {
            for (unsigned b = 0; b < 256; ++b) {
                if (outer.at(a, b) != inner.at(b, a)) return false;
            }
        }
    }
    return true;
}

Permutation parse_permutation(std::string_view text) {
    Permutation p{};
    std::size_t n = 0;
    std::size_t i = 0;
    auto is_sep = [](char ch) { return ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r'; };
    while (i < text.size()) {
        while (i < text.size() && is_sep(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !is_sep(text[j])) ++j;
        std::string_view tok = text.substr(i, j - i);
        int base = 10;
        if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
            tok.remove_prefix(2);
            base = 16;
        }
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || v > 255) {
            throw std::invalid_argument("permutation entry " + std::to_string(n) + " is not a byte value: '" +
                                        std::string(text.substr(i, j - i)) + "'");
        }
        if (n >= 256) throw std::invalid_argument("permutation has more than 256 entries");
        p[n++] = static_cast<std::uint8_t>(v);
        i = j;
    }
    if (n != 256) throw std::invalid_argument("permutation needs 256 entries, got " + std::to_string(n));
    require_permutation(p);
    return p;
}

}  // namespace kcd::cdiff
