#include <gtest/gtest.h>

#include <cmath>

#include "kcd/analysis.hpp"
#include "kcd/rng.hpp"

namespace {

using namespace kcd;
using namespace kcd::analysis;

// One nibble in, one nibble out: 15 * 16 = 240 cells, all in State byte 15.
sampler::MaskConfig nibble_mask() { return sampler::parse_mask("in=0;out=0"); }

State hi_nibble(std::uint8_t v) {
    State s;
    s[15] = static_cast<std::uint8_t>(v << 4);
    return s;
}

sampler::FrequencyMap flat_map(std::uint64_t per_cell) {
    sampler::FrequencyMap m;
    for (std::uint8_t a = 1; a < 16; ++a)
        for (std::uint8_t b = 0; b < 16; ++b) m.counts[{hi_nibble(a), hi_nibble(b)}] = per_cell;
    m.trials_used = 240 * per_cell;
    return m;
}

PairStatistics pair(double bias, double raw_p, std::uint8_t a = 1, std::uint8_t b = 0) {
    PairStatistics p;
    p.a = hi_nibble(a);
    p.b = hi_nibble(b);
    p.bias = bias;
    p.raw_p = raw_p;
    p.categories = classify(bias, raw_p);
    return p;
}

TEST(Classify, Boundaries) {
    EXPECT_EQ(classify(1.4, 0.5), static_cast<std::uint8_t>(Category::moderate_bias));
    EXPECT_EQ(classify(1.41, 0.5), static_cast<std::uint8_t>(Category::strong_bias));
    EXPECT_EQ(classify(1.2, 0.5), static_cast<std::uint8_t>(Category::moderate_bias));
    EXPECT_EQ(classify(1.19, 0.5), 0);
    EXPECT_EQ(classify(1.0, 0.19), static_cast<std::uint8_t>(Category::weakly_significant));
    EXPECT_EQ(classify(1.0, 0.2), 0);
    const auto cm = classify(1.35, 0.09);
    EXPECT_TRUE(cm & static_cast<std::uint8_t>(Category::combined_moderate));
    EXPECT_TRUE(cm & static_cast<std::uint8_t>(Category::moderate_bias));
    EXPECT_TRUE(cm & static_cast<std::uint8_t>(Category::weakly_significant));
    EXPECT_FALSE(classify(1.3, 0.09) & static_cast<std::uint8_t>(Category::combined_moderate));
    EXPECT_FALSE(classify(1.35, 0.1) & static_cast<std::uint8_t>(Category::combined_moderate));
}

TEST(Analyze, RejectsEmptyMap) {
    EXPECT_THROW(analyze(sampler::FrequencyMap{}, nibble_mask(), 5), std::invalid_argument);
}

TEST(Analyze, FlatMapIsQuiet) {
    const auto r = analyze(flat_map(100), nibble_mask(), 3);
    EXPECT_DOUBLE_EQ(r.cells, 240.0);
    EXPECT_DOUBLE_EQ(r.p_expected, 1.0 / 240.0);
    EXPECT_DOUBLE_EQ(r.expected_count, 100.0);
    ASSERT_EQ(r.pair_stats.size(), 240u);
    for (const auto& p : r.pair_stats) {
        EXPECT_DOUBLE_EQ(p.bias, 1.0);
        EXPECT_DOUBLE_EQ(p.chi2, 0.0);
        EXPECT_DOUBLE_EQ(p.fdr_p, 1.0);
    }
    EXPECT_EQ(r.fdr_significant_count, 0u);
    EXPECT_DOUBLE_EQ(r.chi2_gof.statistic, 0.0);
    EXPECT_FALSE(r.anomalies.any());
    EXPECT_DOUBLE_EQ(r.adaptive_alpha, 0.05);
}

TEST(Analyze, BiasFormulaIsExact) {
    SplitMix64 g(3);
    auto m = flat_map(0);
    m.trials_used = 0;
    for (auto& [k, v] : m.counts) {
        v = 50 + g() % 100;
        m.trials_used += v;
    }
    m.trials_skipped = 12;
    const auto r = analyze(m, nibble_mask(), 5);
    const double n = static_cast<double>(m.trials_used);
    for (const auto& p : r.pair_stats) {
        EXPECT_DOUBLE_EQ(p.bias, (static_cast<double>(p.count) / n) / (1.0 / 240.0));
        EXPECT_DOUBLE_EQ(p.expected, n / 240.0);
    }
    EXPECT_EQ(r.trials_skipped, 12u);
}

TEST(Analyze, CorrectionOrderingAndCountInvariants) {
    SplitMix64 g(9);
    auto m = flat_map(0);
    m.trials_used = 0;
    for (auto& [k, v] : m.counts) {
        v = 60 + g() % 80;
        m.trials_used += v;
    }
    const auto r = analyze(m, nibble_mask(), 9);
    std::size_t fdr = 0, raw = 0;
    double max_bias = 0, min_fdr = 1;
    for (const auto& p : r.pair_stats) {
        ASSERT_LE(p.raw_p, p.fdr_p);
        ASSERT_LE(p.fdr_p, p.bonferroni_p);
        ASSERT_LE(p.raw_p, p.holm_p);
        ASSERT_LE(p.holm_p, p.bonferroni_p);
        fdr += p.fdr_p < r.adaptive_alpha;
        raw += p.raw_p < 0.05;
        max_bias = std::max(max_bias, p.bias);
        min_fdr = std::min(min_fdr, p.fdr_p);
    }
    EXPECT_EQ(r.fdr_significant_count, fdr);
    EXPECT_EQ(r.raw_significant_count, raw);
    EXPECT_DOUBLE_EQ(r.max_bias, max_bias);
    EXPECT_DOUBLE_EQ(r.min_fdr_p, min_fdr);
    EXPECT_EQ(r.anomalies.critical_alert, fdr >= 1);
    EXPECT_EQ(r.anomalies.global_distribution, r.g_test.gof.p_value < 1e-3);
    EXPECT_EQ(r.anomalies.bias_persistence, r.max_bias / std::exp2(-3.0) >= 5.0);
    for (std::size_t i = 1; i < r.pair_stats.size(); ++i) {
        const auto& x = r.pair_stats[i - 1];
        const auto& y = r.pair_stats[i];
        ASSERT_TRUE(std::tie(x.a, x.b) < std::tie(y.a, y.b));
    }
}

TEST(Analyze, PlantedCellIsDetected) {
    auto m = flat_map(100);
    m.counts[{hi_nibble(7), hi_nibble(3)}] = 300;
    m.trials_used += 200;
    const auto r = analyze(m, nibble_mask(), 9);
    EXPECT_GE(r.fdr_significant_count, 1u);
    EXPECT_TRUE(r.anomalies.critical_alert);
    const auto& top = r.pair_stats[order_by_fdr_p(r.pair_stats).front()];
    EXPECT_EQ(top.a, hi_nibble(7));
    EXPECT_EQ(top.b, hi_nibble(3));
    EXPECT_EQ(top.count, 300u);
}

TEST(CombinedEvidence, EmptyInput) {
    const auto ev = combined_evidence({}, 0.05);
    EXPECT_FALSE(ev.alert);
    for (const auto& c : ev.categories) {
        EXPECT_EQ(c.members, 0u);
        EXPECT_FALSE(c.fisher.has_value());
    }
}

TEST(CombinedEvidence, NeedsFiveMembers) {
    std::vector<PairStatistics> four(4, pair(2.0, 1e-9));
    const auto ev4 = combined_evidence(four, 0.05);
    EXPECT_EQ(ev4[Category::strong_bias].members, 4u);
    EXPECT_FALSE(ev4[Category::strong_bias].fisher.has_value());
    EXPECT_FALSE(ev4.alert);

    auto five = four;
    five.push_back(pair(2.0, 1e-9));
    const auto ev5 = combined_evidence(five, 0.05);
    ASSERT_TRUE(ev5[Category::strong_bias].fisher.has_value());
    EXPECT_TRUE(ev5[Category::strong_bias].significant);
    EXPECT_TRUE(ev5.alert);
    EXPECT_EQ(ev5[Category::moderate_bias].members, 0u);
}

TEST(CombinedEvidence, WeakMembersStayQuiet) {
    std::vector<PairStatistics> v(6, pair(1.25, 0.9));
    const auto ev = combined_evidence(v, 0.05);
    ASSERT_TRUE(ev[Category::moderate_bias].fisher.has_value());
    EXPECT_FALSE(ev[Category::moderate_bias].significant);
    EXPECT_FALSE(ev.alert);
}

TEST(Clustering, DistanceDefinition) {
    const auto x = pair(1.0, 0.01, 1, 0);
    auto y = pair(std::exp(1.0), 0.01, 2, 0);
    EXPECT_NEAR(pattern_distance(x, y), 1.0, 1e-12);
    y.b[3] = 1;
    EXPECT_NEAR(pattern_distance(x, y), 2.0, 1e-12);
    y.a[0] = 9;
    EXPECT_NEAR(pattern_distance(x, y), 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(pattern_distance(x, x), 0.0);
}

TEST(Clustering, NoCandidatesGivesOneCluster) {
    std::vector<PairStatistics> v{pair(1.0, 0.5), pair(2.0, 0.3), pair(3.0, 0.9)};
    const auto c = cluster_patterns(v);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].members, 3u);
    EXPECT_DOUBLE_EQ(c[0].combined_p, 1.0);
    EXPECT_DOUBLE_EQ(c[0].avg_bias, 2.0);
    EXPECT_TRUE(cluster_patterns({}).empty());
}

TEST(Clustering, CutIsInclusiveAndSingleLinkage) {
    // chain e^0, e^1, e^2 with the same supports: consecutive distances exactly 1
    std::vector<PairStatistics> chain{pair(1.0, 0.01), pair(std::exp(1.0), 0.02), pair(std::exp(2.0), 0.03)};
    const auto joined = cluster_patterns(chain, 1.0);
    ASSERT_EQ(joined.size(), 1u);
    EXPECT_EQ(joined[0].members, 3u);
    const auto split = cluster_patterns(chain, 0.99);
    EXPECT_EQ(split.size(), 3u);
}

TEST(Clustering, SeparatesSupportsAndSkipsNonCandidates) {
    std::vector<PairStatistics> v;
    for (int i = 0; i < 3; ++i) v.push_back(pair(2.0, 0.001));
    for (int i = 0; i < 2; ++i) {
        auto p = pair(2.0, 0.002);
        p.a[0] = 1;
        p.a[1] = 1;
        v.push_back(p);
    }
    v.push_back(pair(2.0, 0.6));
    const auto c = cluster_patterns(v);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].members, 3u);
    EXPECT_EQ(c[1].members, 2u);
    EXPECT_NEAR(c[0].combined_p, stats::fisher_combine(std::vector<double>(3, 0.001)).p_value, 1e-15);
}

TEST(Clustering, CandidateCap) {
    std::vector<PairStatistics> v(kMaxClusterCandidates + 100, pair(2.0, 0.01));
    const auto c = cluster_patterns(v);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].members, kMaxClusterCandidates);
}

TEST(SprtScan, OneRoundBiasIsAccepted) {
    sampler::ExperimentConfig cfg;
    cfg.rounds = 1;
    cfg.masks = sampler::byte_mask(2, 2);
    cfg.seed = 11;
    cfg.master_key = MasterKey::from_hex("8899aabbccddeeff0011223344556677fedcba98765432100123456789abcdef");
    cfg.trials = 1;
    SprtScanParams sp;
    sp.max_trials = 3'000'000;
    sp.batch = 200'000;
    const auto r = sprt_scan(cfg, sp);
    EXPECT_EQ(r.outcome.decision, stats::SprtDecision::accept_h1);
    EXPECT_LT(r.trials_run, sp.max_trials);
    EXPECT_EQ(r.pilot_trials, sp.batch);
    EXPECT_GT(r.pilot_count, 0u);
    EXPECT_DOUBLE_EQ(r.params.p0, 1.0 / 65280.0);
    EXPECT_DOUBLE_EQ(r.params.p1, 1.5 / 65280.0);
    EXPECT_NEAR(r.boundaries.upper, std::log(16.0), 1e-12);
}

TEST(SprtScan, RejectsBadParams) {
    sampler::ExperimentConfig cfg;
    cfg.masks = sampler::byte_mask(0, 0);
    cfg.trials = 1;
    SprtScanParams sp;
    sp.batch = 0;
    EXPECT_THROW(sprt_scan(cfg, sp), std::invalid_argument);
    sp.batch = 10;
    sp.p1_factor = 1.0;
    EXPECT_THROW(sprt_scan(cfg, sp), std::invalid_argument);
}

}  // namespace
