#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Statistical primitives for the distinguisher: null model, per-pair tests,
// multiple-testing corrections, goodness of fit, distribution diagnostics,
// sequential testing and evidence aggregation.
namespace kcd::stats {

// ---------------------------------------------------------------------------
// Null model

/// 1 / ((2^(4 k_a) - 1) * 2^(4 k_b)). Throws std::invalid_argument if either
/// nibble count is outside [1, 32].
double expected_probability(int k_a, int k_b);
/// (2^(4 k_a) - 1) * 2^(4 k_b), exact up to 2^53 and rounded above.
double pair_space_size(int k_a, int k_b);

// ---------------------------------------------------------------------------
// Distributions

double normal_cdf(double z) noexcept;
double normal_sf(double z) noexcept;
/// Upper tail of chi-square with `dof` degrees of freedom. Above 1e7 dof the
/// Wilson-Hilferty cube-root approximation is used.
double chi2_sf(double x, double dof);

/// Two-sided exact binomial test: the total probability of outcomes no more
/// likely than `k` under Binomial(n, p). Relative tolerance 1e-7 on the
/// likelihood comparison.
double binomial_two_sided(std::uint64_t k, std::uint64_t n, double p);

/// Raw p-value of an observed pair count.
inline double pair_pvalue(std::uint64_t count, std::uint64_t trials, double p_exp) {
    return binomial_two_sided(count, trials, p_exp);
}

// ---------------------------------------------------------------------------
// Multiple testing

std::vector<double> benjamini_hochberg(std::span<const double> raw);
std::vector<double> holm(std::span<const double> raw);
std::vector<double> bonferroni(std::span<const double> raw);
std::vector<double> bonferroni(std::span<const double> raw, std::size_t m);

/// Linear-interpolation percentile (q in [0, 100]) of an ascending sample.
double percentile_sorted(std::span<const double> sorted, double q);

inline constexpr double kAdaptiveCap = 0.15;
inline constexpr double kDefaultEta = 0.1;

/// alpha_base * (1 + eta * IQR / sqrt(n)) * (1 + max(0, (r - 5) * 0.1)),
/// capped at 0.15. IQR and n are taken over the counts that are > 0.
double adaptive_threshold(std::span<const std::uint64_t> counts, double alpha_base, int rounds,
                          double eta = kDefaultEta);

// ---------------------------------------------------------------------------
// Divergence and goodness of fit

/// sum p_i ln(p_i / q_i) with 0 ln 0 = 0. Throws std::invalid_argument when
/// q_i == 0 < p_i or the spans differ in length.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct GoodnessOfFit {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

struct ChiSquareSuite {
    std::vector<double> contributions;
    double max_contribution = 0.0;
    GoodnessOfFit gof;
};

ChiSquareSuite chi_square_suite(std::span<const double> observed, std::span<const double> expected);

inline constexpr double kGlobalAnomalyThreshold = 1e-3;

struct GTest {
    GoodnessOfFit gof;
    bool anomaly = false;  // p < 1e-3
};

/// G = 2 sum O ln(O/E); zero cells contribute nothing.
GTest g_test(std::span<const double> observed, std::span<const double> expected);

/// Same tests over a uniform pair space of `cells` cells where only the
/// observed (nonzero) counts are materialized; every cell expects `expected`.
struct SparseGoodnessOfFit {
    GoodnessOfFit chi2;
    GTest g;
    double max_chi2 = 0.0;
    double kl_divergence = 0.0;
    double relative_entropy = 1.0;
};

SparseGoodnessOfFit sparse_goodness_of_fit(std::span<const std::uint64_t> observed, double cells, double expected);

// ---------------------------------------------------------------------------
// Distribution shape

struct AndersonDarling {
    double statistic = 0.0;
    std::array<double, 5> critical_values{0.576, 0.656, 0.787, 0.918, 1.092};
    std::array<double, 5> significance_levels{15.0, 10.0, 5.0, 2.5, 1.0};
};

/// A^2 against a normal with mean and (n-1) standard deviation estimated from
/// the sample. Critical values are the large-sample constants.
AndersonDarling anderson_darling_normal(std::span<const double> sample);

inline constexpr std::size_t kShapiroMaxN = 5000;

struct ShapiroWilk {
    double w = 1.0;
    double p_value = 1.0;
};

/// Royston's (1995) approximation, 3 <= n <= 5000. Throws std::invalid_argument
/// outside that range or for a zero-range sample.
ShapiroWilk shapiro_wilk(std::span<const double> sample);

struct DistributionSummary {
    std::size_t n_pairs = 0;
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;  // n - 1 denominator
    double max = 0.0;
    double min = 0.0;
    double skewness = 0.0;  // biased g1
    double kurtosis = 0.0;  // biased excess g2
    double kl_divergence = 0.0;
    double max_chi2 = 0.0;
    double relative_entropy = 1.0;
    AndersonDarling anderson_darling;
    std::optional<ShapiroWilk> shapiro;
    std::string shapiro_skip_reason;
};

/// Moments of the observed counts plus divergence measures against a uniform
/// spread over `cells` cells. With cells <= 0 the observed set is taken as the
/// whole support and `expected` defaults to the mean count.
DistributionSummary distribution_summary(std::span<const std::uint64_t> counts, double cells = 0.0,
                                         double expected = 0.0);

// ---------------------------------------------------------------------------
// Sequential probability ratio test

enum class SprtDecision { accept_h1, accept_h0, undecided };
std::string_view to_string(SprtDecision d) noexcept;

struct SprtParams {
    double p0 = 0.0;
    double p1 = 0.0;
    double alpha = 0.05;
    double beta = 0.2;
};

struct SprtBoundaries {
    double upper = 0.0;  // ln((1 - beta) / alpha)
    double lower = 0.0;  // ln(beta / (1 - alpha))
};

SprtBoundaries sprt_boundaries(double alpha, double beta);

/// One evaluation step: `trials` Bernoulli draws with `hits` successes.
struct SprtObservation {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
};

struct SprtOutcome {
    SprtDecision decision = SprtDecision::undecided;
    std::uint64_t trials_at_decision = 0;
    std::vector<double> llr_trace;  // LLR after each observation
};

/// Incremental Wald test. Throws std::invalid_argument unless
/// 0 < p0 < p1 < 1 and alpha, beta in (0, 1).
class Sprt {
public:
    explicit Sprt(const SprtParams& params);

    /// Adds one batch and evaluates the boundaries. After a decision further
    /// updates are ignored.
    SprtDecision update(std::uint64_t trials, std::uint64_t hits);

    const SprtOutcome& outcome() const noexcept { return outcome_; }
    SprtBoundaries boundaries() const noexcept { return bounds_; }
    double llr() const noexcept { return llr_; }
    std::uint64_t trials() const noexcept { return trials_; }

private:
    SprtParams params_;
    SprtBoundaries bounds_;
    double hit_step_;
    double miss_step_;
    double llr_ = 0.0;
    std::uint64_t trials_ = 0;
    SprtOutcome outcome_;
};

SprtOutcome sprt(std::span<const SprtObservation> stream, const SprtParams& params);

// ---------------------------------------------------------------------------
// Evidence aggregation

inline constexpr double kFisherFloor = 1e-300;

struct FisherResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t k = 0;
    std::size_t clamped = 0;  // inputs of 0 raised to kFisherFloor
};

/// -2 sum ln p_i against chi-square with 2k dof. Throws std::invalid_argument
/// for an empty input or a value outside [0, 1]; zeros are clamped.
FisherResult fisher_combine(std::span<const double> pvals);

struct BiasPersistence {
    double expected = 0.0;  // 2^(-r/3)
    double ratio = 0.0;
    bool flag = false;  // ratio >= 5
};

inline constexpr double kBiasPersistenceFactor = 5.0;

BiasPersistence bias_persistence(double max_bias, int rounds);

}  // namespace kcd::stats
