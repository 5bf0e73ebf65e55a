#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kcd/stats.hpp"

namespace kcd::stats {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("observed and expected differ in length");
}

double log_cdf_clamped(double z) { return std::log(std::max(normal_cdf(z), 1e-300)); }
double log_sf_clamped(double z) { return std::log(std::max(normal_sf(z), 1e-300)); }

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    require_same_length(p.size(), q.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw std::invalid_argument("expected distribution is zero where observed is not");
        d += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

ChiSquareSuite chi_square_suite(std::span<const double> observed, std::span<const double> expected) {
    require_same_length(observed.size(), expected.size());
    ChiSquareSuite out;
    out.contributions.resize(observed.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("expected counts must be positive");
        const double d = observed[i] - expected[i];
        const double c = d * d / expected[i];
        out.contributions[i] = c;
        out.max_contribution = std::max(out.max_contribution, c);
        sum += c;
    }
    out.gof.statistic = sum;
    out.gof.dof = observed.empty() ? 0.0 : static_cast<double>(observed.size() - 1);
    out.gof.p_value = out.gof.dof > 0 ? chi2_sf(sum, out.gof.dof) : 1.0;
    return out;
}

GTest g_test(std::span<const double> observed, std::span<const double> expected) {
    require_same_length(observed.size(), expected.size());
    GTest out;
    double g = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("expected counts must be positive");
        if (observed[i] > 0.0) g += observed[i] * std::log(observed[i] / expected[i]);
    }
    out.gof.statistic = std::max(2.0 * g, 0.0);
    out.gof.dof = observed.empty() ? 0.0 : static_cast<double>(observed.size() - 1);
    out.gof.p_value = out.gof.dof > 0 ? chi2_sf(out.gof.statistic, out.gof.dof) : 1.0;
    out.anomaly = out.gof.p_value < kGlobalAnomalyThreshold;
    return out;
}

SparseGoodnessOfFit sparse_goodness_of_fit(std::span<const std::uint64_t> observed, double cells, double expected) {
    if (!(expected > 0.0)) throw std::invalid_argument("expected count must be positive");
    if (cells < static_cast<double>(observed.size()))
        throw std::invalid_argument("more observed cells than the pair space holds");

    SparseGoodnessOfFit out;
    double chi2 = 0.0;
    double g = 0.0;
    double total = 0.0;
    double max_chi2 = 0.0;
    std::size_t nonzero = 0;
    for (auto o : observed) {
        const double x = static_cast<double>(o);
        total += x;
        const double d = x - expected;
        const double c = d * d / expected;
        chi2 += c;
        max_chi2 = std::max(max_chi2, c);
        if (o > 0) {
            g += x * std::log(x / expected);
            ++nonzero;
        }
    }
    // every unobserved cell has O = 0
    const double missing = cells - static_cast<double>(observed.size());
    if (missing > 0) {
        chi2 += missing * expected;
        max_chi2 = std::max(max_chi2, expected);
    }

    const double dof = cells - 1.0;
    out.chi2 = {chi2, dof, dof > 0 ? chi2_sf(chi2, dof) : 1.0};
    out.g.gof.statistic = std::max(2.0 * g, 0.0);
    out.g.gof.dof = dof;
    out.g.gof.p_value = dof > 0 ? chi2_sf(out.g.gof.statistic, dof) : 1.0;
    out.g.anomaly = out.g.gof.p_value < kGlobalAnomalyThreshold;
    out.max_chi2 = max_chi2;

    if (total > 0) {
        double kl = 0.0;
        double h = 0.0;
        for (auto o : observed) {
            if (o == 0) continue;
            const double p = static_cast<double>(o) / total;
            kl += p * std::log(p * cells);
            h -= p * std::log(p);
        }
        out.kl_divergence = std::max(kl, 0.0);
        out.relative_entropy = cells > 1 ? std::clamp(h / std::log(cells), 0.0, 1.0) : 1.0;
    }
    return out;
}

AndersonDarling anderson_darling_normal(std::span<const double> sample) {
    AndersonDarling out;
    const std::size_t n = sample.size();
    if (n < 2) return out;
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return out;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = (x[i] - mean) / sd;
        const double zj = (x[n - 1 - i] - mean) / sd;
        acc += static_cast<double>(2 * i + 1) * (log_cdf_clamped(zi) + log_sf_clamped(zj));
    }
    out.statistic = -static_cast<double>(n) - acc / static_cast<double>(n);
    return out;
}

DistributionSummary distribution_summary(std::span<const std::uint64_t> counts, double cells, double expected) {
    if (counts.empty()) throw std::invalid_argument("distribution summary of an empty count set");
    DistributionSummary s;
    const std::size_t n = counts.size();
    s.n_pairs = n;

    std::vector<double> x(counts.begin(), counts.end());
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double nd = static_cast<double>(n);
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    s.mean = total / nd;
    s.median = percentile_sorted(sorted, 50.0);
    s.min = sorted.front();
    s.max = sorted.back();

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    s.std_dev = n > 1 ? std::sqrt(m2 / (nd - 1.0)) : 0.0;
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }

    if (cells <= 0.0) cells = nd;
    if (expected <= 0.0) expected = total / cells;
    if (expected > 0.0) {
        const auto gof = sparse_goodness_of_fit(counts, cells, expected);
        s.kl_divergence = gof.kl_divergence;
        s.max_chi2 = gof.max_chi2;
        s.relative_entropy = gof.relative_entropy;
    }

    s.anderson_darling = anderson_darling_normal(x);
    if (n > kShapiroMaxN) {
        s.shapiro_skip_reason = "Dataset too large for Shapiro-Wilk (N > 5000)";
    } else if (n < 3) {
        s.shapiro_skip_reason = "Shapiro-Wilk needs at least 3 observations";
    } else if (s.min == s.max) {
        s.shapiro_skip_reason = "Shapiro-Wilk undefined for a constant sample";
    } else {
        s.shapiro = shapiro_wilk(x);
    }
    return s;
}

}  // namespace kcd::stats
