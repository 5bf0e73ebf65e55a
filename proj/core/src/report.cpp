#include "kcd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

namespace kcd::report {
namespace {

using analysis::AnalysisResult;
using analysis::Category;
using analysis::PairStatistics;
using sampler::ExperimentConfig;

constexpr std::string_view kRule =
    "================================================================================";

[[gnu::format(printf, 1, 2)]] std::string strf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    va_list ap2;
    va_copy(ap2, ap);
    const int n = std::vsnprintf(nullptr, 0, fmt, ap);
    va_end(ap);
    std::string s(static_cast<std::size_t>(std::max(n, 0)), '\0');
    std::vsnprintf(s.data(), s.size() + 1, fmt, ap2);
    va_end(ap2);
    return s;
}

std::string short_p(double p) { return p >= 1e-3 ? strf("%.3f", p) : sci(p, 2); }

std::string config_line(const ExperimentConfig& cfg) {
    return strf("   Config: %s, c=0x%02x", cfg.masks.name.c_str(), scalar_c(cfg));
}

std::string pair_line(const PairStatistics& p) {
    return strf("%s -> %s (Bias: %.2fx, p: %s)", diff_hex(p.a).c_str(), diff_hex(p.b).c_str(), p.bias,
                short_p(p.raw_p).c_str());
}

std::vector<std::size_t> members_by_p(const AnalysisResult& r, Category c) {
    std::vector<std::size_t> out;
    for (auto i : analysis::order_by_raw_p(r.pair_stats))
        if (r.pair_stats[i].in(c)) out.push_back(i);
    return out;
}

std::string_view category_rule(Category c) {
    switch (c) {
        case Category::strong_bias: return "bias > 1.4";
        case Category::moderate_bias: return "1.2 <= bias <= 1.4";
        case Category::weakly_significant: return "p < 0.2";
        case Category::combined_moderate: return "bias > 1.3 AND p < 0.1";
    }
    return "";
}

}  // namespace

std::uint8_t scalar_c(const ExperimentConfig& cfg) noexcept {
    const auto active = cfg.masks.input.active_bytes();
    for (std::size_t i = 0; i < 16; ++i)
        if (active.test(i)) return cfg.c_vector[i];
    return cfg.c_vector[0];
}

std::string group_thousands(double value, int decimals) {
    std::string s = strf("%.*f", decimals, std::abs(value));
    const auto dot = s.find('.');
    std::string whole = s.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : s.substr(dot);
    std::string grouped;
    for (std::size_t i = 0; i < whole.size(); ++i) {
        if (i > 0 && (whole.size() - i) % 3 == 0) grouped += ',';
        grouped += whole[i];
    }
    return (value < 0 ? "-" : "") + grouped + frac;
}

std::string sci(double value, int digits) { return strf("%.*e", digits, value); }

std::string diff_hex(const State& s) { return "0x" + s.to_hex(); }

std::vector<std::string> alerts(const AnalysisResult& r, const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    if (r.anomalies.critical_alert) {
        std::ostringstream os;
        os << "CRITICAL ALERT: Statistically significant characteristic found for " << r.rounds << " rounds!\n";
        os << config_line(cfg) << '\n';
        os << "   Found " << r.fdr_significant_count << " significant pairs (threshold: 1): Input->Output\n";
        std::size_t shown = 0;
        for (auto i : analysis::order_by_fdr_p(r.pair_stats)) {
            const auto& p = r.pair_stats[i];
            if (!(p.fdr_p < r.adaptive_alpha) || shown == 10) break;
            os << strf("     %s -> %s (Bias:%.1f, p-val:%s)\n", diff_hex(p.a).c_str(), diff_hex(p.b).c_str(), p.bias,
                       sci(p.fdr_p).c_str());
            ++shown;
        }
        out.push_back(os.str());
    }
    if (r.anomalies.combined_significance) {
        std::ostringstream os;
        os << "COMBINED SIGNIFICANCE DETECTED for " << r.rounds << " rounds\n";
        os << config_line(cfg) << '\n';
        for (const auto& ev : r.evidence.categories) {
            if (!ev.significant) continue;
            os << "   Found " << ev.members << " pairs with " << category_rule(ev.category)
               << strf(" (Fisher chi2=%.2f, combined p=%s)\n", ev.fisher->statistic, sci(ev.fisher->p_value).c_str());
        }
        Category lead = Category::combined_moderate;
        for (auto c : {Category::combined_moderate, Category::strong_bias, Category::moderate_bias,
                       Category::weakly_significant}) {
            if (r.evidence[c].significant) {
                lead = c;
                break;
            }
        }
        const auto top = members_by_p(r, lead);
        for (std::size_t k = 0; k < std::min<std::size_t>(3, top.size()); ++k)
            os << "     - " << pair_line(r.pair_stats[top[k]]) << '\n';
        out.push_back(os.str());
    }
    if (r.anomalies.bias_persistence) {
        std::ostringstream os;
        os << "BIAS PERSISTENCE ANOMALY for " << r.rounds << " rounds\n";
        os << config_line(cfg) << '\n';
        os << strf("   Observed bias: %.2fx vs Expected: %.3fx\n", r.max_bias, r.persistence.expected);
        os << strf("   Ratio: %.1fx higher than expected decay\n", r.persistence.ratio);
        out.push_back(os.str());
    }
    if (r.anomalies.global_distribution) {
        std::ostringstream os;
        os << "Global Distribution Anomaly for " << r.rounds << " rounds\n";
        os << config_line(cfg) << '\n';
        os << strf("   G-test: Statistic=%s, P-value=%s (< %s)\n", group_thousands(r.g_test.gof.statistic, 2).c_str(),
                   sci(r.g_test.gof.p_value, 3).c_str(), sci(stats::kGlobalAnomalyThreshold, 0).c_str());
        out.push_back(os.str());
    }
    return out;
}

std::string detailed_report(const AnalysisResult& r, const ExperimentConfig& cfg) {
    const auto& d = r.distribution;
    std::ostringstream os;
    os << kRule << '\n';
    os << strf("DETAILED STATISTICAL ANALYSIS for c=0x%02x, %s\n", scalar_c(cfg), cfg.masks.name.c_str());
    os << kRule << '\n';
    os << strf("RUN: %d rounds, %s trials used, %s skipped, seed %llu\n", r.rounds,
               group_thousands(static_cast<double>(r.trials_used)).c_str(),
               group_thousands(static_cast<double>(r.trials_skipped)).c_str(),
               static_cast<unsigned long long>(cfg.seed));
    os << strf("  Pair space: %s cells, expected count per pair: %.2f\n\n", group_thousands(r.cells).c_str(),
               r.expected_count);

    os << "DISTRIBUTION PROPERTIES:\n";
    os << "  Total unique pairs observed: " << group_thousands(static_cast<double>(d.n_pairs)) << '\n';
    os << strf("  Mean/Median/Std Dev count: %.2f / %.2f / %.2f\n", d.mean, d.median, d.std_dev);
    os << strf("  Max/Min count: %.0f / %.0f\n", d.max, d.min);
    os << strf("  Skewness/Kurtosis: %.3f / %.3f\n\n", d.skewness, d.kurtosis);

    os << "ENHANCED BIAS METRICS:\n";
    os << strf("  KL Divergence: %.6f\n", d.kl_divergence);
    os << strf("  Max Chi-square: %.2f\n", d.max_chi2);
    os << strf("  Relative Entropy: %.3f\n", d.relative_entropy);
    os << strf("  Max Bias: %.2fx\n\n", r.max_bias);

    os << "NORMALITY TESTS (on the distribution of observed counts):\n";
    if (d.shapiro)
        os << strf("  Shapiro-Wilk Test: W=%.5f, P-value=%s\n", d.shapiro->w, sci(d.shapiro->p_value, 3).c_str());
    else
        os << "  Shapiro-Wilk Test: Skipped. Reason: " << d.shapiro_skip_reason << '\n';
    const auto& ad = d.anderson_darling;
    os << strf("  Anderson-Darling Test: Statistic=%.3f\n", ad.statistic);
    os << strf("    Critical Values (Sig Levels): [%.3f, %.3f, %.3f, %.3f, %.3f] ([%.1f, %.1f, %.1f, %.1f, %.1f])\n",
               ad.critical_values[0], ad.critical_values[1], ad.critical_values[2], ad.critical_values[3],
               ad.critical_values[4], ad.significance_levels[0], ad.significance_levels[1], ad.significance_levels[2],
               ad.significance_levels[3], ad.significance_levels[4]);
    os << "    (Statistic above a critical value suggests a non-normal count distribution at that level)\n\n";

    os << "GOODNESS-OF-FIT TESTS (vs. Uniform Distribution):\n";
    os << "  (Uniformity over " << group_thousands(r.cells) << " pairs. Degrees of freedom: "
       << group_thousands(r.chi2_gof.dof) << ")\n";
    os << strf("  Chi-square Test: Statistic=%s, P-value=%s\n", group_thousands(r.chi2_gof.statistic, 2).c_str(),
               sci(r.chi2_gof.p_value, 3).c_str());
    os << strf("  G-test (Log-likelihood): Statistic=%s, P-value=%s\n", group_thousands(r.g_test.gof.statistic, 2).c_str(),
               sci(r.g_test.gof.p_value, 3).c_str());
    os << "    (P-value below 1e-03 flags a global non-uniformity anomaly)\n\n";

    os << "CLUSTER ANALYSIS:\n";
    const auto sig_clusters =
        std::count_if(r.clusters.begin(), r.clusters.end(), [&](const auto& c) { return c.combined_p < r.adaptive_alpha; });
    os << "  Found " << r.clusters.size() << " clusters, " << sig_clusters << " significant\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(r.clusters.size(), 10); ++i) {
        const auto& c = r.clusters[i];
        os << strf("  Cluster %zu: %zu members, combined p=%s, avg bias=%.2fx\n", i + 1, c.members,
                   sci(c.combined_p, 3).c_str(), c.avg_bias);
    }
    os << '\n';

    os << "UNCORRECTED SIGNIFICANT PAIRS (raw p < 0.05, before FDR):\n";
    os << "  Found " << r.raw_significant_count << " pairs significant before correction\n";
    if (r.raw_significant_count > 0) {
        os << "  Top 5 by raw p-value:\n";
        const auto order = analysis::order_by_raw_p(r.pair_stats);
        for (std::size_t k = 0; k < std::min<std::size_t>(5, r.raw_significant_count); ++k)
            os << "    " << pair_line(r.pair_stats[order[k]]) << '\n';
    }
    os << '\n';

    os << "SIGNIFICANT DIFFERENTIAL PAIRS (FDR-corrected p < " << sci(r.adaptive_alpha, 3) << "):\n";
    os << "  Found " << r.fdr_significant_count << " significant pairs.";
    if (r.fdr_significant_count > 0) {
        os << " Top 10 by corrected p-value:\n";
        os << strf("  %-34s %-34s %-10s %-8s %-12s\n", "Input Diff (A)", "Output Diff (B)", "Obs Count", "Bias",
                   "Corr P-val");
        os << "  " << std::string(34, '-') << ' ' << std::string(34, '-') << ' ' << std::string(10, '-') << ' '
           << std::string(8, '-') << ' ' << std::string(12, '-') << '\n';
        std::size_t shown = 0;
        for (auto i : analysis::order_by_fdr_p(r.pair_stats)) {
            const auto& p = r.pair_stats[i];
            if (!(p.fdr_p < r.adaptive_alpha) || shown == 10) break;
            os << strf("  %-34s %-34s %-10llu %-8s %s\n", diff_hex(p.a).c_str(), diff_hex(p.b).c_str(),
                       static_cast<unsigned long long>(p.count), strf("%.1fx", p.bias).c_str(), sci(p.fdr_p).c_str());
            ++shown;
        }
    } else {
        os << '\n';
    }

    if (r.sprt_outcome) {
        os << "\nSEQUENTIAL TEST (SPRT):\n";
        os << "  Decision: " << stats::to_string(r.sprt_outcome->decision) << " after "
           << group_thousands(static_cast<double>(r.sprt_outcome->trials_at_decision)) << " trials\n";
        if (!r.sprt_outcome->llr_trace.empty())
            os << strf("  Final LLR: %.4f\n", r.sprt_outcome->llr_trace.back());
    }
    os << kRule << '\n';

    for (const auto& block : alerts(r, cfg)) os << '\n' << block;
    return os.str();
}

std::string_view to_string(Marker m) noexcept {
    switch (m) {
        case Marker::fdr_significant: return "FDR*";
        case Marker::combined_evidence: return "CE*";
        case Marker::none: break;
    }
    return "";
}

SummaryRow summary_row(const AnalysisResult& r, const ExperimentConfig& cfg) {
    SummaryRow row;
    row.rounds = r.rounds;
    row.c = scalar_c(cfg);
    row.config_name = cfg.masks.name;
    row.max_bias = r.max_bias;
    row.fdr_sig_count = r.fdr_significant_count;
    row.min_fdr_p = r.min_fdr_p;
    if (row.fdr_sig_count >= 1)
        row.marker = Marker::fdr_significant;
    else if (r.evidence.alert)
        row.marker = Marker::combined_evidence;
    return row;
}

void sort_rows(std::vector<SummaryRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& x, const SummaryRow& y) {
        if (x.min_fdr_p != y.min_fdr_p) return x.min_fdr_p < y.min_fdr_p;
        if (x.c != y.c) return x.c < y.c;
        return x.config_name < y.config_name;
    });
}

std::string summary_table(std::vector<SummaryRow> rows, bool unicode) {
    sort_rows(rows);
    std::ostringstream os;
    os << strf("%-6s %-6s %-4s %-28s %-9s %-8s %s\n", "Marker", "Rounds", "c", "Configuration", "Max Bias", "FDR Sig.",
               "Min FDR P-val");
    os << std::string(80, '-') << '\n';
    for (const auto& row : rows) {
        std::string marker(to_string(row.marker));
        if (unicode && row.marker == Marker::fdr_significant) marker = "‡";
        if (unicode && row.marker == Marker::combined_evidence) marker = "†";
        // pad by display width; the dagger glyphs are one column but three bytes
        const std::size_t width = unicode && row.marker != Marker::none ? 1 : marker.size();
        os << marker << std::string(width < 6 ? 6 - width : 0, ' ');
        os << strf(" %-6d 0x%02x %-28s %-9s %-8zu %s\n", row.rounds, row.c, row.config_name.c_str(),
                   strf("%.1fx", row.max_bias).c_str(), row.fdr_sig_count, sci(row.min_fdr_p).c_str());
    }
    os << "\n" << (unicode ? "‡ " : "")
       << "FDR*: significant after false discovery rate correction at the adaptive threshold\n";
    os << (unicode ? "† " : "") << "CE*: combined evidence (Fisher) without a single FDR-significant pair\n";
    return os.str();
}

std::string file_stem(int rounds, std::uint8_t c, std::string_view config_name) {
    std::string name;
    for (std::size_t i = 0; i < config_name.size(); ++i) {
        if (config_name.substr(i, 2) == "->") {
            name += "_to_";
            ++i;
            continue;
        }
        const char ch = config_name[i];
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                        ch == '.' || ch == '-';
        name += ok ? ch : '_';
    }
    return strf("%dr_0x%02x_%s", rounds, c, name.c_str());
}

}  // namespace kcd::report
