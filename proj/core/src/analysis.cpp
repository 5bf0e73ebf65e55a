#include "kcd/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace kcd::analysis {
namespace {

std::uint16_t byte_support(const State& s) noexcept {
    std::uint16_t bits = 0;
    for (std::size_t i = 0; i < 16; ++i)
        if (s[i] != 0) bits |= static_cast<std::uint16_t>(1u << i);
    return bits;
}

template <class Key>
std::vector<std::size_t> order_by(std::span<const PairStatistics> pairs, Key key) {
    std::vector<std::size_t> idx(pairs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // pair_stats is already (a, b) ordered, so a stable sort keeps that as the tie-break
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return key(pairs[x]) < key(pairs[y]); });
    return idx;
}

}  // namespace

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::strong_bias: return "strong_bias";
        case Category::moderate_bias: return "moderate_bias";
        case Category::weakly_significant: return "weakly_significant";
        case Category::combined_moderate: return "combined_moderate";
    }
    return "unknown";
}

std::uint8_t classify(double bias, double raw_p) noexcept {
    std::uint8_t c = 0;
    if (bias > 1.4) c |= static_cast<std::uint8_t>(Category::strong_bias);
    if (bias >= 1.2 && bias <= 1.4) c |= static_cast<std::uint8_t>(Category::moderate_bias);
    if (raw_p < 0.2) c |= static_cast<std::uint8_t>(Category::weakly_significant);
    if (bias > 1.3 && raw_p < 0.1) c |= static_cast<std::uint8_t>(Category::combined_moderate);
    return c;
}

const CategoryEvidence& CombinedEvidence::operator[](Category c) const {
    for (const auto& e : categories)
        if (e.category == c) return e;
    throw std::out_of_range("unknown category");
}

CombinedEvidence combined_evidence(std::span<const PairStatistics> pairs, double alpha) {
    CombinedEvidence out;
    for (std::size_t i = 0; i < kCategories.size(); ++i) {
        auto& ev = out.categories[i];
        ev.category = kCategories[i];
        std::vector<double> p;
        for (const auto& ps : pairs)
            if (ps.in(ev.category)) p.push_back(ps.raw_p);
        ev.members = p.size();
        if (ev.members >= kFisherMinMembers) {
            ev.fisher = stats::fisher_combine(p);
            ev.significant = ev.fisher->p_value < alpha;
            out.alert = out.alert || ev.significant;
        }
    }
    return out;
}

double pattern_distance(const PairStatistics& x, const PairStatistics& y) noexcept {
    const int ham = std::popcount(static_cast<unsigned>(byte_support(x.a) ^ byte_support(y.a))) +
                    std::popcount(static_cast<unsigned>(byte_support(x.b) ^ byte_support(y.b)));
    return ham + std::abs(std::log(x.bias) - std::log(y.bias));
}

std::vector<Cluster> cluster_patterns(std::span<const PairStatistics> pairs, double cut) {
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].raw_p < kCandidateP) cand.push_back(i);

    if (cand.empty()) {
        if (pairs.empty()) return {};
        double bias = 0.0;
        for (const auto& p : pairs) bias += p.bias;
        return {Cluster{pairs.size(), 1.0, bias / static_cast<double>(pairs.size())}};
    }
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) { return pairs[x].raw_p < pairs[y].raw_p; });
    if (cand.size() > kMaxClusterCandidates) cand.resize(kMaxClusterCandidates);

    // Prim's MST; cutting edges longer than `cut` leaves the single-linkage clusters.
    const std::size_t n = cand.size();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, n);
    std::vector<bool> done(n, false);
    std::vector<std::size_t> uf(n);
    std::iota(uf.begin(), uf.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (uf[v] != v) v = uf[v] = uf[uf[v]];
        return v;
    };
    best[0] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!done[v] && (u == n || best[v] < best[u])) u = v;
        done[u] = true;
        if (parent[u] != n && best[u] <= cut) uf[find(u)] = find(parent[u]);
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v]) continue;
            const double d = pattern_distance(pairs[cand[u]], pairs[cand[v]]);
            if (d < best[v]) {
                best[v] = d;
                parent[v] = u;
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < n; ++v) groups[find(v)].push_back(cand[v]);
    std::vector<Cluster> out;
    for (const auto& [root, members] : groups) {
        std::vector<double> p;
        double bias = 0.0;
        for (auto i : members) {
            p.push_back(pairs[i].raw_p);
            bias += pairs[i].bias;
        }
        out.push_back({members.size(), stats::fisher_combine(p).p_value, bias / static_cast<double>(members.size())});
    }
    std::stable_sort(out.begin(), out.end(), [](const Cluster& x, const Cluster& y) {
        if (x.members != y.members) return x.members > y.members;
        return x.combined_p < y.combined_p;
    });
    return out;
}

std::vector<std::size_t> order_by_raw_p(std::span<const PairStatistics> pairs) {
    return order_by(pairs, [](const PairStatistics& p) { return p.raw_p; });
}

std::vector<std::size_t> order_by_fdr_p(std::span<const PairStatistics> pairs) {
    return order_by(pairs, [](const PairStatistics& p) { return p.fdr_p; });
}

AnalysisResult analyze(const sampler::FrequencyMap& freq, const sampler::MaskConfig& masks, int rounds,
                       const AnalysisParams& params) {
    if (freq.trials_used == 0) throw std::invalid_argument("frequency map holds no used trials");
    AnalysisResult r;
    r.rounds = rounds;
    r.trials_used = freq.trials_used;
    r.trials_skipped = freq.trials_skipped;
    r.pattern_matches = freq.pattern_matches;
    r.p_expected = stats::expected_probability(masks.input.count(), masks.output.count());
    r.cells = stats::pair_space_size(masks.input.count(), masks.output.count());
    const double n_used = static_cast<double>(freq.trials_used);
    r.expected_count = n_used * r.p_expected;

    const auto entries = freq.sorted();
    std::vector<std::uint64_t> counts;
    counts.reserve(entries.size());
    std::map<std::uint64_t, double> pmemo;
    r.pair_stats.reserve(entries.size());
    for (const auto& [key, count] : entries) {
        PairStatistics ps;
        ps.a = key.a;
        ps.b = key.b;
        ps.count = count;
        ps.expected = r.expected_count;
        ps.bias = (static_cast<double>(count) / n_used) / r.p_expected;
        const double d = static_cast<double>(count) - r.expected_count;
        ps.chi2 = d * d / r.expected_count;
        auto it = pmemo.find(count);
        if (it == pmemo.end()) it = pmemo.emplace(count, stats::pair_pvalue(count, freq.trials_used, r.p_expected)).first;
        ps.raw_p = it->second;
        counts.push_back(count);
        r.pair_stats.push_back(ps);
    }

    std::vector<double> raw(r.pair_stats.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = r.pair_stats[i].raw_p;
    const auto fdr = stats::benjamini_hochberg(raw);
    const auto holm = stats::holm(raw);
    const auto bonf = stats::bonferroni(raw);
    r.adaptive_alpha = stats::adaptive_threshold(counts, params.alpha_base, rounds, params.eta);

    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& ps = r.pair_stats[i];
        ps.fdr_p = fdr[i];
        ps.holm_p = holm[i];
        ps.bonferroni_p = bonf[i];
        ps.categories = classify(ps.bias, ps.raw_p);
        if (ps.fdr_p < r.adaptive_alpha) ++r.fdr_significant_count;
        if (ps.raw_p < kCandidateP) ++r.raw_significant_count;
        r.max_bias = std::max(r.max_bias, ps.bias);
        r.min_fdr_p = std::min(r.min_fdr_p, ps.fdr_p);
    }

    r.distribution = stats::distribution_summary(counts, r.cells, r.expected_count);
    const auto gof = stats::sparse_goodness_of_fit(counts, r.cells, r.expected_count);
    r.chi2_gof = gof.chi2;
    r.g_test = gof.g;

    r.clusters = cluster_patterns(r.pair_stats, params.cluster_cut);
    r.evidence = combined_evidence(r.pair_stats, r.adaptive_alpha);
    r.persistence = stats::bias_persistence(r.max_bias, rounds);

    r.anomalies.global_distribution = r.g_test.anomaly;
    r.anomalies.bias_persistence = r.persistence.flag;
    r.anomalies.combined_significance = r.evidence.alert;
    r.anomalies.critical_alert = r.fdr_significant_count >= 1;
    return r;
}

SprtScanResult sprt_scan(const sampler::ExperimentConfig& cfg, const SprtScanParams& params, unsigned workers) {
    sampler::validate(cfg);
    if (params.batch == 0) throw std::invalid_argument("SPRT batch size must be positive");
    if (!(params.p1_factor > 1.0)) throw std::invalid_argument("SPRT alternative factor must exceed 1");
    const cipher::Kuznyechik cipher(cfg.master_key);

    SprtScanResult out;
    const std::uint64_t limit = params.max_trials;
    const std::uint64_t pilot_n = std::min(params.batch, limit);
    const auto pilot = sampler::run_trials(cfg, cipher, 0, pilot_n, workers);
    out.pilot_trials = pilot_n;
    out.trials_run = pilot_n;
    for (const auto& [key, count] : pilot.sorted()) {
        if (count > out.pilot_count) {
            out.pilot_count = count;
            out.target = key;
        }
    }

    const double p0 = stats::expected_probability(cfg.masks.input.count(), cfg.masks.output.count());
    out.params = {p0, std::min(p0 * params.p1_factor, 0.5 * (1.0 + p0)), params.alpha, params.beta};
    stats::Sprt test(out.params);
    out.boundaries = test.boundaries();

    std::uint64_t first = pilot_n;
    while (first < limit && test.outcome().decision == stats::SprtDecision::undecided) {
        const std::uint64_t n = std::min(params.batch, limit - first);
        const auto batch = sampler::run_trials(cfg, cipher, first, n, workers);
        test.update(batch.trials_used, batch.count(out.target.a, out.target.b));
        first += n;
    }
    out.trials_run = first;
    out.outcome = test.outcome();
    if (out.outcome.decision == stats::SprtDecision::undecided) out.outcome.trials_at_decision = test.trials();
    return out;
}

}  // namespace kcd::analysis
