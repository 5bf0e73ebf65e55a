#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kcd/stats.hpp"

namespace kcd::stats {
namespace {

std::vector<std::size_t> ascending_order(std::span<const double> p) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    return idx;
}

void check_unit_interval(std::span<const double> p) {
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
}

}  // namespace

std::vector<double> benjamini_hochberg(std::span<const double> raw) {
    check_unit_interval(raw);
    const std::size_t m = raw.size();
    std::vector<double> out(m);
    if (m == 0) return out;
    const auto order = ascending_order(raw);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        const std::size_t i = order[r];
        const double scaled = raw[i] * static_cast<double>(m) / static_cast<double>(r + 1);
        running = std::min(running, scaled);
        // m/(r+1) >= 1, but the product can round one ulp below raw[i]
        out[i] = std::max(raw[i], std::min(1.0, running));
    }
    return out;
}

std::vector<double> holm(std::span<const double> raw) {
    check_unit_interval(raw);
    const std::size_t m = raw.size();
    std::vector<double> out(m);
    const auto order = ascending_order(raw);
    double running = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = order[r];
        const double scaled = std::min(1.0, raw[i] * static_cast<double>(m - r));
        running = std::max(running, scaled);
        out[i] = running;
    }
    return out;
}

std::vector<double> bonferroni(std::span<const double> raw, std::size_t m) {
    check_unit_interval(raw);
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::min(1.0, raw[i] * static_cast<double>(m));
    return out;
}

std::vector<double> bonferroni(std::span<const double> raw) { return bonferroni(raw, raw.size()); }

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double adaptive_threshold(std::span<const std::uint64_t> counts, double alpha_base, int rounds, double eta) {
    if (!(alpha_base > 0.0 && alpha_base < 1.0)) throw std::invalid_argument("alpha_base must be in (0, 1)");
    std::vector<double> observed;
    observed.reserve(counts.size());
    for (auto c : counts)
        if (c > 0) observed.push_back(static_cast<double>(c));
    std::sort(observed.begin(), observed.end());

    double noise = 1.0;
    if (!observed.empty()) {
        const double iqr = percentile_sorted(observed, 75.0) - percentile_sorted(observed, 25.0);
        noise = 1.0 + eta * iqr / std::sqrt(static_cast<double>(observed.size()));
    }
    const double round_factor = 1.0 + std::max(0.0, (rounds - 5) * 0.1);
    return std::min(alpha_base * noise * round_factor, kAdaptiveCap);
}

}  // namespace kcd::stats
