#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "kcd/stats.hpp"

// Royston's polynomial approximations for the coefficients and the null
// distribution of W.
namespace kcd::stats {
namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double r = 0.0;
    for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
    return r;
}

constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

std::vector<double> coefficients(std::size_t n) {
    std::vector<double> a(n, 0.0);
    if (n == 3) {
        a[0] = -std::numbers::sqrt2 / 2.0;
        a[2] = -a[0];
        return a;
    }
    const boost::math::normal_distribution<double> std_normal;
    const double nd = static_cast<double>(n);
    std::vector<double> m(n);
    double mm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = boost::math::quantile(std_normal, (static_cast<double>(i + 1) - 0.375) / (nd + 0.25));
        mm += m[i] * m[i];
    }
    const double u = 1.0 / std::sqrt(nd);
    const double root = std::sqrt(mm);
    const double an = m[n - 1] / root + poly(kC1, u);
    a[n - 1] = an;
    a[0] = -an;
    std::size_t edge = 1;
    double phi = 0.0;
    if (n > 5) {
        const double an1 = m[n - 2] / root + poly(kC2, u);
        a[n - 2] = an1;
        a[1] = -an1;
        edge = 2;
        phi = (mm - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) / (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
    } else {
        phi = (mm - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
    }
    const double scale = 1.0 / std::sqrt(phi);
    for (std::size_t i = edge; i < n - edge; ++i) a[i] = m[i] * scale;
    return a;
}

}  // namespace

ShapiroWilk shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > kShapiroMaxN) throw std::invalid_argument("Shapiro-Wilk needs 3 <= n <= 5000");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) throw std::invalid_argument("Shapiro-Wilk undefined for a constant sample");

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const auto a = coefficients(n);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += a[i] * x[i];

    ShapiroWilk out;
    out.w = std::min(1.0, num * num / ss);
    const double w = out.w;
    const double nd = static_cast<double>(n);

    if (n == 3) {
        const double p = 6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - std::asin(std::sqrt(0.75)));
        out.p_value = std::clamp(p, 0.0, 1.0);
        return out;
    }
    double y = std::log1p(-w);
    double mu = 0.0;
    double sigma = 0.0;
    if (n <= 11) {
        const double gamma = poly(kG, nd);
        if (y >= gamma) {
            out.p_value = 1e-99;
            return out;
        }
        y = -std::log(gamma - y);
        mu = poly(kC3, nd);
        sigma = std::exp(poly(kC4, nd));
    } else {
        const double ln_n = std::log(nd);
        mu = poly(kC5, ln_n);
        sigma = std::exp(poly(kC6, ln_n));
    }
    out.p_value = normal_sf((y - mu) / sigma);
    return out;
}

}  // namespace kcd::stats
