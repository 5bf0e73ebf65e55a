#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "kcd/report.hpp"

#ifndef KCD_VERSION_STRING
#define KCD_VERSION_STRING "unknown"
#endif

namespace kcd::report {
namespace {

using nlohmann::ordered_json;

ordered_json gof_json(const stats::GoodnessOfFit& g) {
    return {{"statistic", g.statistic}, {"dof", g.dof}, {"p_value", g.p_value}};
}

ordered_json mask_json(const sampler::MaskConfig& m) {
    return {{"name", m.name}, {"input", m.input.indices()}, {"output", m.output.indices()}};
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> category_names(std::uint8_t bits) {
    std::vector<std::string> out;
    for (auto c : analysis::kCategories)
        if (bits & static_cast<std::uint8_t>(c)) out.emplace_back(analysis::to_string(c));
    return out;
}

}  // namespace

std::string to_json(const analysis::AnalysisResult& r, const sampler::ExperimentConfig& cfg,
                    const analysis::AnalysisParams& params, int indent) {
    ordered_json j;
    j["tool"] = "kuzcd";
    j["version"] = KCD_VERSION_STRING;
    j["config"] = {{"rounds", cfg.rounds},
                   {"c", scalar_c(cfg)},
                   {"c_vector", cfg.c_vector.to_hex()},
                   {"mask", mask_json(cfg.masks)},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"master_key", cfg.master_key.to_hex()},
                   {"alpha_base", params.alpha_base},
                   {"eta", params.eta},
                   {"cluster_cut", params.cluster_cut}};
    j["sampling"] = {{"trials_used", r.trials_used},
                     {"trials_skipped", r.trials_skipped},
                     {"pattern_matches", r.pattern_matches}};
    j["model"] = {{"p_expected", r.p_expected}, {"cells", r.cells}, {"expected_count", r.expected_count}};

    const auto& d = r.distribution;
    ordered_json dist = {{"n_pairs", d.n_pairs},     {"mean", d.mean},
                         {"median", d.median},       {"std_dev", d.std_dev},
                         {"max", d.max},             {"min", d.min},
                         {"skewness", d.skewness},   {"kurtosis", d.kurtosis},
                         {"kl_divergence", d.kl_divergence}, {"max_chi2", d.max_chi2},
                         {"relative_entropy", d.relative_entropy}};
    dist["anderson_darling"] = {{"statistic", d.anderson_darling.statistic},
                                {"critical_values", d.anderson_darling.critical_values},
                                {"significance_levels", d.anderson_darling.significance_levels}};
    if (d.shapiro)
        dist["shapiro"] = {{"w", d.shapiro->w}, {"p_value", d.shapiro->p_value}};
    else
        dist["shapiro"] = {{"skipped", d.shapiro_skip_reason}};

    ordered_json evidence = ordered_json::array();
    for (const auto& ev : r.evidence.categories) {
        ordered_json e = {{"category", analysis::to_string(ev.category)}, {"members", ev.members}};
        if (ev.fisher) {
            e["fisher_statistic"] = ev.fisher->statistic;
            e["fisher_p"] = ev.fisher->p_value;
            e["clamped"] = ev.fisher->clamped;
        }
        e["significant"] = ev.significant;
        evidence.push_back(std::move(e));
    }
    ordered_json clusters = ordered_json::array();
    for (const auto& c : r.clusters)
        clusters.push_back({{"members", c.members}, {"combined_p", c.combined_p}, {"avg_bias", c.avg_bias}});

    ordered_json summary = {{"adaptive_alpha", r.adaptive_alpha},
                            {"fdr_significant_count", r.fdr_significant_count},
                            {"raw_significant_count", r.raw_significant_count},
                            {"max_bias", r.max_bias},
                            {"min_fdr_p", r.min_fdr_p}};
    summary["distribution"] = std::move(dist);
    summary["global_tests"] = {{"chi2_gof", gof_json(r.chi2_gof)}, {"g_test", gof_json(r.g_test.gof)}};
    summary["clusters"] = std::move(clusters);
    summary["combined_evidence"] = std::move(evidence);
    summary["bias_persistence"] = {{"expected", r.persistence.expected},
                                   {"ratio", r.persistence.ratio},
                                   {"flag", r.persistence.flag}};
    if (r.sprt_outcome) {
        summary["sprt"] = {{"decision", stats::to_string(r.sprt_outcome->decision)},
                           {"trials_at_decision", r.sprt_outcome->trials_at_decision},
                           {"llr_trace", r.sprt_outcome->llr_trace}};
    }
    j["summary"] = std::move(summary);

    ordered_json anomalies = ordered_json::array();
    if (r.anomalies.global_distribution) anomalies.push_back("global_distribution");
    if (r.anomalies.bias_persistence) anomalies.push_back("bias_persistence");
    if (r.anomalies.combined_significance) anomalies.push_back("combined_significance");
    if (r.anomalies.critical_alert) anomalies.push_back("critical_alert");
    j["anomalies"] = std::move(anomalies);

    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pair_stats) {
        pairs.push_back({{"a", p.a.to_hex()},
                         {"b", p.b.to_hex()},
                         {"count", p.count},
                         {"expected", p.expected},
                         {"bias", p.bias},
                         {"chi2", p.chi2},
                         {"raw_p", p.raw_p},
                         {"fdr_p", p.fdr_p},
                         {"holm_p", p.holm_p},
                         {"bonferroni_p", p.bonferroni_p},
                         {"categories", category_names(p.categories)}});
    }
    j["pairs"] = std::move(pairs);
    return j.dump(indent) + "\n";
}

std::string to_csv(const analysis::AnalysisResult& r) {
    std::ostringstream os;
    os << "a,b,count,expected,bias,chi2,raw_p,fdr_p,holm_p,bonferroni_p,categories\n";
    for (const auto& p : r.pair_stats) {
        std::string cats;
        for (const auto& c : category_names(p.categories)) cats += (cats.empty() ? "" : "|") + c;
        os << p.a.to_hex() << ',' << p.b.to_hex() << ',' << p.count << ',' << g17(p.expected) << ',' << g17(p.bias)
           << ',' << g17(p.chi2) << ',' << g17(p.raw_p) << ',' << g17(p.fdr_p) << ',' << g17(p.holm_p) << ','
           << g17(p.bonferroni_p) << ',' << cats << '\n';
    }
    return os.str();
}

ImportedRun from_json(std::string_view text) {
    ImportedRun out;
    try {
        const auto j = nlohmann::json::parse(text);
        const auto& c = j.at("config");
        out.cfg.rounds = c.at("rounds").get<int>();
        out.cfg.c_vector = State::from_hex(c.at("c_vector").get<std::string>());
        const auto& m = c.at("mask");
        out.cfg.masks.name = m.at("name").get<std::string>();
        out.cfg.masks.input = sampler::NibbleMask::from_indices(m.at("input").get<std::vector<int>>());
        out.cfg.masks.output = sampler::NibbleMask::from_indices(m.at("output").get<std::vector<int>>());
        out.cfg.trials = c.at("trials").get<std::uint64_t>();
        out.cfg.seed = c.at("seed").get<std::uint64_t>();
        out.cfg.master_key = MasterKey::from_hex(c.at("master_key").get<std::string>());
        out.params.alpha_base = c.at("alpha_base").get<double>();
        out.params.eta = c.at("eta").get<double>();
        out.params.cluster_cut = c.at("cluster_cut").get<double>();

        const auto& s = j.at("sampling");
        out.freq.trials_used = s.at("trials_used").get<std::uint64_t>();
        out.freq.trials_skipped = s.at("trials_skipped").get<std::uint64_t>();
        out.freq.pattern_matches = s.at("pattern_matches").get<std::uint64_t>();
        for (const auto& p : j.at("pairs")) {
            const sampler::PairKey key{State::from_hex(p.at("a").get<std::string>()),
                                       State::from_hex(p.at("b").get<std::string>())};
            out.freq.counts[key] = p.at("count").get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed results document: ") + e.what());
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

ExportPaths export_results(const analysis::AnalysisResult& r, const sampler::ExperimentConfig& cfg,
                           const analysis::AnalysisParams& params, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    const auto stem = file_stem(cfg.rounds, scalar_c(cfg), cfg.masks.name);
    ExportPaths paths{dir / (stem + ".txt"), dir / (stem + ".json"), dir / (stem + ".csv")};
    write_file(paths.text, detailed_report(r, cfg));
    write_file(paths.json, to_json(r, cfg, params));
    write_file(paths.csv, to_csv(r));
    return paths;
}

}  // namespace kcd::report
