#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kcd/stats.hpp"

namespace kcd::stats {
namespace {

using boost::math::binomial_distribution;

constexpr double kWilsonHilfertyDof = 1e7;
constexpr double kLikelihoodTolerance = 1.0 + 1e-7;

}  // namespace

double pair_space_size(int k_a, int k_b) {
    if (k_a < 1 || k_a > 32 || k_b < 1 || k_b > 32) {
        throw std::invalid_argument("nibble counts must be in [1, 32], got k_a=" + std::to_string(k_a) +
                                    " k_b=" + std::to_string(k_b));
    }
    return (std::ldexp(1.0, 4 * k_a) - 1.0) * std::ldexp(1.0, 4 * k_b);
}

double expected_probability(int k_a, int k_b) { return 1.0 / pair_space_size(k_a, k_b); }

double normal_cdf(double z) noexcept { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

double normal_sf(double z) noexcept { return 0.5 * boost::math::erfc(z / std::sqrt(2.0)); }

double chi2_sf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi-square dof must be positive");
    if (!(x > 0.0)) return 1.0;
    if (dof > kWilsonHilfertyDof) {
        const double v = 2.0 / (9.0 * dof);
        const double z = (std::cbrt(x / dof) - (1.0 - v)) / std::sqrt(v);
        return normal_sf(z);
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double binomial_two_sided(std::uint64_t k, std::uint64_t n, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial probability must be in (0, 1)");
    if (k > n) throw std::invalid_argument("binomial count exceeds trials");
    if (n == 0) return 1.0;

    const binomial_distribution<double> dist(static_cast<double>(n), p);
    const double mean = static_cast<double>(n) * p;
    const double kd = static_cast<double>(k);
    const double d = boost::math::pdf(dist, kd) * kLikelihoodTolerance;
    auto pmf = [&](std::uint64_t j) { return boost::math::pdf(dist, static_cast<double>(j)); };

    double pv = 1.0;
    if (kd < mean) {
        // first j >= ceil(mean) whose probability does not exceed that of k;
        // the pmf is non-increasing on that range
        std::uint64_t lo = static_cast<std::uint64_t>(std::ceil(mean));
        std::uint64_t hi = n + 1;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (pmf(mid) <= d)
                hi = mid;
            else
                lo = mid + 1;
        }
        const double upper = lo > n ? 0.0 : boost::math::cdf(boost::math::complement(dist, static_cast<double>(lo) - 1.0));
        pv = boost::math::cdf(dist, kd) + upper;
    } else if (kd > mean) {
        // last j <= floor(mean) whose probability does not exceed that of k
        std::int64_t lo = -1;
        std::int64_t hi = static_cast<std::int64_t>(std::floor(mean));
        while (lo < hi) {
            const std::int64_t mid = lo + (hi - lo + 1) / 2;
            if (pmf(static_cast<std::uint64_t>(mid)) <= d)
                lo = mid;
            else
                hi = mid - 1;
        }
        const double lower = lo < 0 ? 0.0 : boost::math::cdf(dist, static_cast<double>(lo));
        pv = lower + boost::math::cdf(boost::math::complement(dist, kd - 1.0));
    }
    return std::min(1.0, pv);
}

}  // namespace kcd::stats
