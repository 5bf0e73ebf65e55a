#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kcd/analysis.hpp"
#include "kcd/report.hpp"
#include "kcd/sampler.hpp"
#include "kcd/state.hpp"

namespace kcd::cli {

enum ExitCode : int { kExitClean = 0, kExitUsage = 1, kExitCritical = 2 };

enum class CScope { all, active };  // scalar c broadcast to every byte, or only to active input bytes
enum class OutputFormat { text, json, csv };

struct RunPlan {
    std::vector<int> rounds_list{9};
    std::vector<std::uint8_t> c_list{0x01, 0x02, 0x03, 0x04, 0x91, 0xBE, 0xE1};
    std::vector<sampler::MaskConfig> mask_list = sampler::default_masks();
    std::uint64_t trials = 5'000'000;
    std::uint64_t seed = 1;
    std::optional<MasterKey> master_key;  // derived from the seed when absent
    unsigned workers = 0;
    unsigned jobs = 1;  // configurations analysed concurrently
    analysis::AnalysisParams params;
    std::filesystem::path output_dir = "kuzcd-out";
    CScope c_scope = CScope::all;
    bool sprt = false;
    std::uint64_t sprt_batch = 100'000;
    OutputFormat format = OutputFormat::text;
};

/// Throws std::invalid_argument on an empty list, zero trials, rounds outside
/// 1..9, c == 0 or an empty input mask.
void validate(const RunPlan& plan);

/// Overlays the fields present in a JSON config document onto `plan`.
void apply_config(RunPlan& plan, std::string_view json);

/// Deterministic experiment key: 32 SplitMix64 bytes key a cipher that
/// encrypts the counter blocks 0 and 1.
MasterKey derive_master_key(std::uint64_t seed);
MasterKey resolve_key(const RunPlan& plan);

std::uint8_t parse_c(std::string_view text);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

/// Expansion order: rounds, then c, then masks.
std::vector<sampler::ExperimentConfig> expand(const RunPlan& plan);

struct ConfigOutcome {
    sampler::ExperimentConfig cfg;
    std::optional<analysis::AnalysisResult> result;
    std::optional<report::ExportPaths> paths;
    std::string error;
};

struct MatrixOutcome {
    std::vector<ConfigOutcome> configs;
    std::vector<report::SummaryRow> rows;
    bool critical = false;
    std::size_t failures = 0;
};

/// Runs every configuration, writing reports into plan.output_dir. A failing
/// configuration is recorded and the matrix continues.
MatrixOutcome run_matrix(const RunPlan& plan, std::ostream* progress = nullptr);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kcd::cli
