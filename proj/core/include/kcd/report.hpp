#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kcd/analysis.hpp"
#include "kcd/sampler.hpp"

namespace kcd::report {

/// The scalar multiplier a run was built from: the value at the first active
/// input byte of the c vector.
std::uint8_t scalar_c(const sampler::ExperimentConfig& cfg) noexcept;

/// "1,234,567"
std::string group_thousands(double value, int decimals = 0);
/// "1.85e-03"
std::string sci(double value, int digits = 2);
/// "0x" followed by 32 hex characters.
std::string diff_hex(const State& s);

std::string detailed_report(const analysis::AnalysisResult& result, const sampler::ExperimentConfig& cfg);

/// One text block per raised anomaly, in the order critical alert, combined
/// significance, bias persistence, global distribution.
std::vector<std::string> alerts(const analysis::AnalysisResult& result, const sampler::ExperimentConfig& cfg);

enum class Marker { fdr_significant, combined_evidence, none };
std::string_view to_string(Marker m) noexcept;

struct SummaryRow {
    Marker marker = Marker::none;
    int rounds = 0;
    std::uint8_t c = 1;
    std::string config_name;
    double max_bias = 0.0;
    std::size_t fdr_sig_count = 0;
    double min_fdr_p = 1.0;
};

SummaryRow summary_row(const analysis::AnalysisResult& result, const sampler::ExperimentConfig& cfg);
/// Sorts by min FDR p, then (c, config name).
void sort_rows(std::vector<SummaryRow>& rows);
/// ASCII markers "FDR*" and "CE*"; with `unicode` the double and single dagger.
std::string summary_table(std::vector<SummaryRow> rows, bool unicode = false);

/// "<rounds>r_0x<cc>_<name>" with "->" spelled "_to_" and anything outside
/// [A-Za-z0-9_.-] replaced by '_'.
std::string file_stem(int rounds, std::uint8_t c, std::string_view config_name);

// Machine-readable exports. JSON carries the config echo (seed and master
// key included), every pair statistic, the summaries and the anomalies.
std::string to_json(const analysis::AnalysisResult& result, const sampler::ExperimentConfig& cfg,
                    const analysis::AnalysisParams& params, int indent = 2);
std::string to_csv(const analysis::AnalysisResult& result);

struct ImportedRun {
    sampler::ExperimentConfig cfg;
    sampler::FrequencyMap freq;
    analysis::AnalysisParams params;
};
ImportedRun from_json(std::string_view json);

struct ExportPaths {
    std::filesystem::path text;
    std::filesystem::path json;
    std::filesystem::path csv;
};

/// Writes <stem>.txt, <stem>.json and <stem>.csv into `dir`. Throws
/// std::runtime_error naming the path on I/O failure.
ExportPaths export_results(const analysis::AnalysisResult& result, const sampler::ExperimentConfig& cfg,
                           const analysis::AnalysisParams& params, const std::filesystem::path& dir);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace kcd::report
