#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kcd/sampler.hpp"
#include "kcd/state.hpp"
#include "kcd/stats.hpp"

// Turns a frequency map into per-pair statistics, global tests, evidence
// aggregation, clusters and anomaly flags.
namespace kcd::analysis {

enum class Category : std::uint8_t {
    strong_bias = 1u << 0,         // bias > 1.4
    moderate_bias = 1u << 1,       // 1.2 <= bias <= 1.4
    weakly_significant = 1u << 2,  // raw p < 0.2
    combined_moderate = 1u << 3,   // bias > 1.3 and raw p < 0.1
};
inline constexpr std::array<Category, 4> kCategories{Category::strong_bias, Category::moderate_bias,
                                                     Category::weakly_significant, Category::combined_moderate};
std::string_view to_string(Category c) noexcept;
std::uint8_t classify(double bias, double raw_p) noexcept;

struct PairStatistics {
    State a;
    State b;
    std::uint64_t count = 0;
    double expected = 0.0;
    double bias = 0.0;
    double chi2 = 0.0;
    double raw_p = 1.0;
    double fdr_p = 1.0;
    double holm_p = 1.0;
    double bonferroni_p = 1.0;
    std::uint8_t categories = 0;

    bool in(Category c) const noexcept { return (categories & static_cast<std::uint8_t>(c)) != 0; }
};

inline constexpr std::size_t kFisherMinMembers = 5;

struct CategoryEvidence {
    Category category = Category::strong_bias;
    std::size_t members = 0;
    std::optional<stats::FisherResult> fisher;  // set when members >= 5
    bool significant = false;
};

struct CombinedEvidence {
    std::array<CategoryEvidence, 4> categories;
    bool alert = false;

    const CategoryEvidence& operator[](Category c) const;
};

CombinedEvidence combined_evidence(std::span<const PairStatistics> pairs, double alpha);

struct Cluster {
    std::size_t members = 0;
    double combined_p = 1.0;
    double avg_bias = 0.0;
};

inline constexpr double kCandidateP = 0.05;
inline constexpr std::size_t kMaxClusterCandidates = 4096;
inline constexpr double kDefaultClusterCut = 1.0;

/// Distance between two pairs: Hamming distance of the byte supports of a
/// and of b, plus |ln bias_1 - ln bias_2|.
double pattern_distance(const PairStatistics& x, const PairStatistics& y) noexcept;

/// Single-linkage clustering of the pairs with raw p < 0.05 (the 4096 smallest
/// p-values at most), cut at `cut`. Without candidates every pair lands in one
/// cluster with combined p 1. Clusters ordered by size, then combined p.
std::vector<Cluster> cluster_patterns(std::span<const PairStatistics> pairs, double cut = kDefaultClusterCut);

struct Anomalies {
    bool global_distribution = false;
    bool bias_persistence = false;
    bool combined_significance = false;
    bool critical_alert = false;

    bool any() const noexcept {
        return global_distribution || bias_persistence || combined_significance || critical_alert;
    }
    friend bool operator==(const Anomalies&, const Anomalies&) = default;
};

struct AnalysisParams {
    double alpha_base = 0.05;
    double eta = stats::kDefaultEta;
    double cluster_cut = kDefaultClusterCut;
};

struct AnalysisResult {
    int rounds = 0;
    std::uint64_t trials_used = 0;
    std::uint64_t trials_skipped = 0;
    std::uint64_t pattern_matches = 0;
    double p_expected = 0.0;
    double cells = 0.0;
    double expected_count = 0.0;

    std::vector<PairStatistics> pair_stats;  // ordered by (a, b)
    stats::DistributionSummary distribution;
    stats::GoodnessOfFit chi2_gof;
    stats::GTest g_test;
    double adaptive_alpha = 0.0;
    std::size_t fdr_significant_count = 0;
    std::size_t raw_significant_count = 0;
    double max_bias = 0.0;
    double min_fdr_p = 1.0;
    std::optional<stats::SprtOutcome> sprt_outcome;
    std::vector<Cluster> clusters;
    CombinedEvidence evidence;
    stats::BiasPersistence persistence;
    Anomalies anomalies;
};

/// Throws std::invalid_argument if the map holds no used trial.
AnalysisResult analyze(const sampler::FrequencyMap& freq, const sampler::MaskConfig& masks, int rounds,
                       const AnalysisParams& params = {});

/// Indices of pairs by ascending raw or corrected p; ties by (a, b).
std::vector<std::size_t> order_by_raw_p(std::span<const PairStatistics> pairs);
std::vector<std::size_t> order_by_fdr_p(std::span<const PairStatistics> pairs);

struct SprtScanParams {
    std::uint64_t max_trials = 5'000'000;
    std::uint64_t batch = 100'000;
    double alpha = 0.05;
    double beta = 0.2;
    double p1_factor = 1.5;
};

struct SprtScanResult {
    sampler::PairKey target;
    std::uint64_t pilot_trials = 0;
    std::uint64_t pilot_count = 0;
    stats::SprtParams params;
    stats::SprtBoundaries boundaries;
    stats::SprtOutcome outcome;
    std::uint64_t trials_run = 0;  // including the pilot batch
};

/// The first batch picks the most frequent pair as the target; later batches
/// feed the Wald test with hits on that pair among the used trials.
SprtScanResult sprt_scan(const sampler::ExperimentConfig& cfg, const SprtScanParams& params, unsigned workers = 0);

}  // namespace kcd::analysis
