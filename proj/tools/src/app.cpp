#include "kcd/cli/app.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "kcd/cdiff.hpp"
#include "kcd/cipher.hpp"
#include "kcd/rng.hpp"

namespace kcd::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kWorkersEnv = "KUZCD_WORKERS";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

OutputFormat parse_format(std::string_view s) {
    const auto v = lower(s);
    if (v == "text") return OutputFormat::text;
    if (v == "json") return OutputFormat::json;
    if (v == "csv") return OutputFormat::csv;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected text, json or csv)");
}

CScope parse_scope(std::string_view s) {
    const auto v = lower(s);
    if (v == "all") return CScope::all;
    if (v == "active") return CScope::active;
    throw std::invalid_argument("unknown c scope '" + std::string(s) + "' (expected all or active)");
}

std::optional<unsigned> env_workers() {
    const char* v = std::getenv(kWorkersEnv);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return static_cast<unsigned>(parse_u64(v, kWorkersEnv));
}

std::uint8_t json_c(const json& v) {
    if (v.is_number_unsigned()) {
        const auto n = v.get<std::uint64_t>();
        if (n == 0 || n > 255) throw std::invalid_argument("c must be in [1, 255]");
        return static_cast<std::uint8_t>(n);
    }
    return parse_c(v.get<std::string>());
}

template <class T, class F>
std::vector<T> json_list(const json& v, F conv) {
    std::vector<T> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(conv(e));
    else
        out.push_back(conv(v));
    return out;
}

std::string rule_line(const sampler::ExperimentConfig& cfg) {
    std::ostringstream os;
    os << cfg.rounds << "r c=0x" << std::hex;
    os.width(2);
    os.fill('0');
    os << static_cast<unsigned>(report::scalar_c(cfg)) << std::dec << ' ' << cfg.masks.name;
    return os.str();
}

std::string rows_csv(const std::vector<report::SummaryRow>& rows_in) {
    auto rows = rows_in;
    report::sort_rows(rows);
    std::ostringstream os;
    os << "marker,rounds,c,configuration,max_bias,fdr_sig,min_fdr_p\n";
    for (const auto& r : rows) {
        char c[8];
        std::snprintf(c, sizeof c, "0x%02x", r.c);
        os << report::to_string(r.marker) << ',' << r.rounds << ',' << c << ',' << r.config_name << ','
           << r.max_bias << ',' << r.fdr_sig_count << ',' << report::sci(r.min_fdr_p) << '\n';
    }
    return os.str();
}

std::string rows_json(const MatrixOutcome& m) {
    auto rows = m.rows;
    report::sort_rows(rows);
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
        j.push_back({{"marker", report::to_string(r.marker)},
                     {"rounds", r.rounds},
                     {"c", r.c},
                     {"configuration", r.config_name},
                     {"max_bias", r.max_bias},
                     {"fdr_sig", r.fdr_sig_count},
                     {"min_fdr_p", r.min_fdr_p}});
    }
    ordered_json doc = {{"summary", std::move(j)}, {"failures", ordered_json::array()}};
    for (const auto& c : m.configs)
        if (!c.error.empty()) doc["failures"].push_back({{"config", rule_line(c.cfg)}, {"error", c.error}});
    return doc.dump(2) + "\n";
}

// --- subcommands -----------------------------------------------------------

struct CipherArgs {
    std::string key;
    std::string block;
    int rounds = cipher::kFullRounds;
};

int cmd_cipher(const CipherArgs& a, bool forward, std::ostream& out) {
    const auto key = MasterKey::from_hex(a.key);
    const auto block = State::from_hex(a.block);
    const cipher::Kuznyechik k(key);
    out << (forward ? k.encrypt(block, a.rounds) : k.decrypt(block, a.rounds)).to_hex() << '\n';
    return kExitClean;
}

struct TableArgs {
    std::string orientation = "inner";
    std::string target = "sbox";
    std::string format = "text";
    std::string c;
};

cdiff::Permutation load_target(const std::string& target) {
    if (target == "sbox") return cipher::sbox_table();
    if (target == "sbox-inv") return cipher::sbox_inv_table();
    return cdiff::parse_permutation(report::read_file(target));
}

int cmd_cdu_table(const TableArgs& a, std::ostream& out) {
    const auto orient = cdiff::orientation_from_string(a.orientation);
    const auto f = load_target(a.target);
    const auto fmt = parse_format(a.format);

    if (!a.c.empty()) {
        const auto t = cdiff::cddt(f, parse_c(a.c), orient);
        for (unsigned row = 0; row < 256; ++row) {
            const auto r = t.row(row);
            for (unsigned b = 0; b < 256; ++b) out << (b ? "," : "") << r[b];
            out << '\n';
        }
        return kExitClean;
    }

    const auto spec = cdiff::full_spectrum(f, orient);
    switch (fmt) {
        case OutputFormat::csv:
            out << "c,hex,delta\n";
            for (unsigned c = 1; c < 256; ++c) {
                char hex[8];
                std::snprintf(hex, sizeof hex, "0x%02x", c);
                out << c << ',' << hex << ',' << spec.per_c[c] << '\n';
            }
            break;
        case OutputFormat::json: {
            ordered_json j = {{"orientation", cdiff::to_string(orient)}, {"target", a.target}};
            ordered_json d = ordered_json::object();
            for (unsigned c = 1; c < 256; ++c) {
                char hex[8];
                std::snprintf(hex, sizeof hex, "0x%02x", c);
                d[hex] = spec.per_c[c];
            }
            j["delta"] = std::move(d);
            j["max"] = spec.max();
            out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::text: {
            out << cdiff::to_string(orient) << " c-differential uniformity of " << a.target << '\n';
            // five columns, read down then across
            constexpr unsigned kCols = 5;
            constexpr unsigned kRows = 51;
            for (unsigned r = 0; r < kRows; ++r) {
                for (unsigned col = 0; col < kCols; ++col) {
                    const unsigned c = 1 + col * kRows + r;
                    if (c > 255) continue;
                    char cell[32];
                    std::snprintf(cell, sizeof cell, "%s%3u 0x%02x %3u", col ? " | " : "", c, c, spec.per_c[c]);
                    out << cell;
                }
                out << '\n';
            }
            out << "max delta: " << spec.max() << '\n';
            break;
        }
    }
    return kExitClean;
}

struct ScanArgs {
    int rounds = cipher::kFullRounds;
    std::string c = "01";
    std::string mask = "byte_8_in->byte_8_out";
    std::uint64_t max_trials = 5'000'000;
    std::uint64_t batch = 100'000;
    std::uint64_t seed = 1;
    std::string key;
    double alpha = 0.05;
    double beta = 0.2;
    double p1_factor = 1.5;
    std::string scope = "all";
    std::string format = "text";
};

int cmd_sprt_scan(const ScanArgs& a, unsigned workers, std::ostream& out) {
    RunPlan plan;
    plan.rounds_list = {a.rounds};
    plan.c_list = {parse_c(a.c)};
    plan.mask_list = {sampler::parse_mask(a.mask)};
    plan.trials = a.max_trials;
    plan.seed = a.seed;
    if (!a.key.empty()) plan.master_key = MasterKey::from_hex(a.key);
    plan.c_scope = parse_scope(a.scope);
    validate(plan);
    const auto cfg = expand(plan).front();

    analysis::SprtScanParams p;
    p.max_trials = a.max_trials;
    p.batch = a.batch;
    p.alpha = a.alpha;
    p.beta = a.beta;
    p.p1_factor = a.p1_factor;
    const auto s = analysis::sprt_scan(cfg, p, workers);

    if (parse_format(a.format) == OutputFormat::json) {
        ordered_json j = {{"config", rule_line(cfg)},
                          {"seed", cfg.seed},
                          {"master_key", cfg.master_key.to_hex()},
                          {"target", {{"a", s.target.a.to_hex()}, {"b", s.target.b.to_hex()}}},
                          {"pilot_trials", s.pilot_trials},
                          {"pilot_count", s.pilot_count},
                          {"p0", s.params.p0},
                          {"p1", s.params.p1},
                          {"upper", s.boundaries.upper},
                          {"lower", s.boundaries.lower},
                          {"decision", stats::to_string(s.outcome.decision)},
                          {"trials_at_decision", s.outcome.trials_at_decision},
                          {"trials_run", s.trials_run},
                          {"llr_trace", s.outcome.llr_trace}};
        out << j.dump(2) << '\n';
        return kExitClean;
    }
    char buf[160];
    out << "SPRT scan: " << rule_line(cfg) << '\n';
    out << "  Target pair: " << report::diff_hex(s.target.a) << " -> " << report::diff_hex(s.target.b) << " ("
        << s.pilot_count << " hits in the " << report::group_thousands(static_cast<double>(s.pilot_trials))
        << "-trial pilot batch)\n";
    std::snprintf(buf, sizeof buf, "  p0=%s p1=%s  boundaries A=%.4f B=%.4f\n", report::sci(s.params.p0, 3).c_str(),
                  report::sci(s.params.p1, 3).c_str(), s.boundaries.upper, s.boundaries.lower);
    out << buf;
    for (std::size_t i = 0; i < s.outcome.llr_trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "  batch %zu: LLR %.4f\n", i + 1, s.outcome.llr_trace[i]);
        out << buf;
    }
    out << "  Decision: " << stats::to_string(s.outcome.decision) << " after "
        << report::group_thousands(static_cast<double>(s.outcome.trials_at_decision)) << " sequential trials ("
        << report::group_thousands(static_cast<double>(s.trials_run)) << " including the pilot)\n";
    return kExitClean;
}

}  // namespace

std::uint8_t parse_c(std::string_view text) {
    std::string_view t = text;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) t.remove_prefix(2);
    unsigned v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v, 16);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw std::invalid_argument("c must be a hex byte, got '" + std::string(text) + "'");
    if (v == 0 || v > 255) throw std::invalid_argument("c must be in [0x01, 0xff], got '" + std::string(text) + "'");
    return static_cast<std::uint8_t>(v);
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 10);
    if (text.empty() || ec != std::errc() || p != text.data() + text.size())
        throw std::invalid_argument(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

void validate(const RunPlan& plan) {
    if (plan.rounds_list.empty()) throw std::invalid_argument("no rounds given");
    if (plan.c_list.empty()) throw std::invalid_argument("no c values given");
    if (plan.mask_list.empty()) throw std::invalid_argument("no masks given");
    if (plan.trials == 0) throw std::invalid_argument("trial count must be positive");
    for (int r : plan.rounds_list)
        if (r < 1 || r > cipher::kFullRounds) throw std::invalid_argument("rounds must be in [1, 9], got " + std::to_string(r));
    for (auto c : plan.c_list)
        if (c == 0) throw std::invalid_argument("c must be nonzero");
    for (const auto& m : plan.mask_list) sampler::validate(m);
    if (!(plan.params.alpha_base > 0.0 && plan.params.alpha_base < 1.0))
        throw std::invalid_argument("alpha-base must be in (0, 1)");
    if (plan.params.eta < 0.0) throw std::invalid_argument("eta must be non-negative");
    if (plan.sprt_batch == 0) throw std::invalid_argument("SPRT batch size must be positive");
    if (plan.jobs == 0) throw std::invalid_argument("jobs must be positive");
}

void apply_config(RunPlan& plan, std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const std::vector<std::string> known{"rounds", "c",     "masks", "trials",   "seed", "key",        "workers",
                                                "jobs",   "alpha_base", "eta", "cluster_cut", "out", "c_scope", "sprt",
                                                "sprt_batch", "format"};
    try {
        for (const auto& [k, v] : j.items()) {
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw std::invalid_argument("unknown config field '" + k + "'");
        }
        if (j.contains("rounds")) plan.rounds_list = json_list<int>(j["rounds"], [](const json& e) { return e.get<int>(); });
        if (j.contains("c")) plan.c_list = json_list<std::uint8_t>(j["c"], json_c);
        if (j.contains("masks"))
            plan.mask_list = json_list<sampler::MaskConfig>(
                j["masks"], [](const json& e) { return sampler::parse_mask(e.get<std::string>()); });
        if (j.contains("trials")) plan.trials = j["trials"].get<std::uint64_t>();
        if (j.contains("seed")) plan.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("key")) plan.master_key = MasterKey::from_hex(j["key"].get<std::string>());
        if (j.contains("workers")) plan.workers = j["workers"].get<unsigned>();
        if (j.contains("jobs")) plan.jobs = j["jobs"].get<unsigned>();
        if (j.contains("alpha_base")) plan.params.alpha_base = j["alpha_base"].get<double>();
        if (j.contains("eta")) plan.params.eta = j["eta"].get<double>();
        if (j.contains("cluster_cut")) plan.params.cluster_cut = j["cluster_cut"].get<double>();
        if (j.contains("out")) plan.output_dir = j["out"].get<std::string>();
        if (j.contains("c_scope")) plan.c_scope = parse_scope(j["c_scope"].get<std::string>());
        if (j.contains("sprt")) plan.sprt = j["sprt"].get<bool>();
        if (j.contains("sprt_batch")) plan.sprt_batch = j["sprt_batch"].get<std::uint64_t>();
        if (j.contains("format")) plan.format = parse_format(j["format"].get<std::string>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config field has the wrong type: ") + e.what());
    }
}

MasterKey derive_master_key(std::uint64_t seed) {
    SplitMix64 rng(mix64(seed ^ 0x6B757A6E79656368ULL));
    MasterKey seed_key;
    for (std::size_t i = 0; i < MasterKey::kSize; i += 8) {
        const auto w = rng();
        for (std::size_t j = 0; j < 8; ++j) seed_key.bytes[i + j] = static_cast<std::uint8_t>(w >> (56 - 8 * j));
    }
    const cipher::Kuznyechik k(seed_key);
    MasterKey out;
    for (std::uint8_t block = 0; block < 2; ++block) {
        State ctr;
        ctr[15] = block;
        const auto ct = k.encrypt(ctr);
        std::copy(ct.bytes.begin(), ct.bytes.end(), out.bytes.begin() + 16 * block);
    }
    return out;
}

MasterKey resolve_key(const RunPlan& plan) { return plan.master_key ? *plan.master_key : derive_master_key(plan.seed); }

std::vector<sampler::ExperimentConfig> expand(const RunPlan& plan) {
    const auto key = resolve_key(plan);
    std::vector<sampler::ExperimentConfig> out;
    for (int r : plan.rounds_list) {
        for (auto c : plan.c_list) {
            for (const auto& m : plan.mask_list) {
                sampler::ExperimentConfig cfg;
                cfg.rounds = r;
                cfg.c_vector = plan.c_scope == CScope::all ? sampler::broadcast_c(c) : sampler::masked_c(c, m.input);
                cfg.masks = m;
                cfg.trials = plan.trials;
                cfg.seed = plan.seed;
                cfg.master_key = key;
                out.push_back(std::move(cfg));
            }
        }
    }
    return out;
}

MatrixOutcome run_matrix(const RunPlan& plan, std::ostream* progress) {
    validate(plan);
    MatrixOutcome m;
    for (auto& cfg : expand(plan)) m.configs.push_back({std::move(cfg), std::nullopt, std::nullopt, {}});

    std::mutex log_mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < m.configs.size(); i = next++) {
            auto& slot = m.configs[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto freq = sampler::run_trials(slot.cfg, plan.workers);
                auto result = analysis::analyze(freq, slot.cfg.masks, slot.cfg.rounds, plan.params);
                if (plan.sprt) {
                    analysis::SprtScanParams sp;
                    sp.max_trials = slot.cfg.trials;
                    sp.batch = plan.sprt_batch;
                    result.sprt_outcome = analysis::sprt_scan(slot.cfg, sp, plan.workers).outcome;
                }
                slot.paths = report::export_results(result, slot.cfg, plan.params, plan.output_dir);
                slot.result = std::move(result);
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
            if (progress) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                std::lock_guard lock(log_mu);
                *progress << "[" << (i + 1) << "/" << m.configs.size() << "] " << rule_line(slot.cfg);
                if (slot.error.empty())
                    *progress << ": " << slot.result->fdr_significant_count << " FDR-significant, max bias "
                              << slot.result->max_bias << " (" << secs << " s)\n";
                else
                    *progress << ": FAILED: " << slot.error << '\n';
            }
        }
    };
    const unsigned jobs = std::min<unsigned>(plan.jobs, static_cast<unsigned>(m.configs.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& c : m.configs) {
        if (!c.error.empty()) {
            ++m.failures;
            continue;
        }
        m.rows.push_back(report::summary_row(*c.result, c.cfg));
        m.critical = m.critical || c.result->anomalies.critical_alert;
    }
    std::ostringstream summary;
    summary << report::summary_table(m.rows);
    for (const auto& c : m.configs)
        if (!c.error.empty()) summary << "FAILED " << rule_line(c.cfg) << ": " << c.error << '\n';
    report::write_file(plan.output_dir / "summary.txt", summary.str());
    return m;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Truncated inner c-differential analysis of reduced-round Kuznyechik", "kuzcd"};
    app.require_subcommand(1);
    app.set_version_flag("--version", KCD_VERSION_STRING);

    CipherArgs enc_args;
    auto* enc = app.add_subcommand("encrypt", "Encrypt one block");
    auto* dec = app.add_subcommand("decrypt", "Decrypt one block");
    for (auto* sub : {enc, dec}) {
        sub->add_option("--key", enc_args.key, "256-bit key, 64 hex characters")->required();
        sub->add_option("block,--block", enc_args.block, "128-bit block, 32 hex characters")->required();
        sub->add_option("--rounds", enc_args.rounds, "Rounds (1-9)")->check(CLI::Range(1, 9));
    }

    TableArgs table_args;
    auto* table = app.add_subcommand("cdu-table", "c-differential uniformity spectrum of an S-box");
    table->add_option("--orientation", table_args.orientation, "inner or outer")->check(CLI::IsMember({"inner", "outer"}));
    table->add_option("--target", table_args.target, "sbox, sbox-inv or a file with 256 values");
    table->add_option("--format", table_args.format, "text, csv or json");
    table->add_option("--c", table_args.c, "Print the full 256x256 table for this c as CSV");

    RunPlan flags;
    std::string config_file, key_hex, scope = "all", format = "text";
    std::vector<int> rounds;
    std::vector<std::string> cs, masks;
    unsigned workers = 0;
    auto* an = app.add_subcommand("analyze", "Run the (rounds x c x mask) experiment matrix");
    auto* o_config = an->add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
    auto* o_rounds = an->add_option("--rounds", rounds, "Rounds (repeatable)");
    auto* o_c = an->add_option("--c", cs, "Multiplier c as a hex byte (repeatable)");
    auto* o_mask = an->add_option("--mask", masks, "byte_<i>_in->byte_<j>_out or in=..;out=.. (repeatable)");
    auto* o_trials = an->add_option("--trials", flags.trials, "Trials per configuration");
    auto* o_seed = an->add_option("--seed", flags.seed, "Run seed");
    auto* o_key = an->add_option("--key", key_hex, "Experiment key (64 hex); derived from the seed if absent");
    auto* o_workers = an->add_option("--workers", workers, "Sampling threads (0 = all cores)");
    auto* o_jobs = an->add_option("--jobs", flags.jobs, "Configurations run concurrently");
    auto* o_alpha = an->add_option("--alpha-base", flags.params.alpha_base, "Base significance level");
    auto* o_eta = an->add_option("--eta", flags.params.eta, "IQR noise weight of the adaptive threshold");
    auto* o_out = an->add_option("--out", flags.output_dir, "Output directory");
    auto* o_scope = an->add_option("--c-scope", scope, "all: c on every byte; active: only on active input bytes");
    auto* o_sprt = an->add_flag("--sprt", flags.sprt, "Also run a sequential test per configuration");
    auto* o_batch = an->add_option("--sprt-batch", flags.sprt_batch, "SPRT batch size");
    auto* o_format = an->add_option("--format", format, "Summary on stdout: text, json or csv");

    ScanArgs scan_args;
    unsigned scan_workers = 0;
    auto* scan = app.add_subcommand("sprt-scan", "Sequential test on one configuration with early stopping");
    scan->add_option("--rounds", scan_args.rounds, "Rounds (1-9)");
    scan->add_option("--c", scan_args.c, "Multiplier c as a hex byte");
    scan->add_option("--mask", scan_args.mask, "Mask configuration");
    scan->add_option("--max-trials,--trials", scan_args.max_trials, "Trial budget");
    scan->add_option("--batch", scan_args.batch, "Trials per SPRT step");
    scan->add_option("--seed", scan_args.seed, "Run seed");
    scan->add_option("--key", scan_args.key, "Experiment key (64 hex)");
    auto* o_scan_workers = scan->add_option("--workers", scan_workers, "Sampling threads (0 = all cores)");
    scan->add_option("--alpha", scan_args.alpha, "Type I error");
    scan->add_option("--beta", scan_args.beta, "Type II error");
    scan->add_option("--p1-factor", scan_args.p1_factor, "Alternative rate as a multiple of P_exp");
    scan->add_option("--c-scope", scan_args.scope, "all or active");
    scan->add_option("--format", scan_args.format, "text or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitClean : kExitUsage;
    }

    auto workers_for = [](CLI::Option* opt, unsigned flag_value, unsigned fallback) -> unsigned {
        if (opt->count()) return flag_value;
        if (auto env = env_workers()) return *env;
        return fallback;
    };

    try {
        if (enc->parsed()) return cmd_cipher(enc_args, true, out);
        if (dec->parsed()) return cmd_cipher(enc_args, false, out);
        if (table->parsed()) return cmd_cdu_table(table_args, out);
        if (scan->parsed()) return cmd_sprt_scan(scan_args, workers_for(o_scan_workers, scan_workers, 0), out);

        RunPlan plan;
        if (o_config->count()) apply_config(plan, report::read_file(config_file));
        if (o_rounds->count()) plan.rounds_list = rounds;
        if (o_c->count()) {
            plan.c_list.clear();
            for (const auto& c : cs) plan.c_list.push_back(parse_c(c));
        }
        if (o_mask->count()) {
            plan.mask_list.clear();
            for (const auto& m : masks) plan.mask_list.push_back(sampler::parse_mask(m));
        }
        if (o_trials->count()) plan.trials = flags.trials;
        if (o_seed->count()) plan.seed = flags.seed;
        if (o_key->count()) plan.master_key = MasterKey::from_hex(key_hex);
        if (o_jobs->count()) plan.jobs = flags.jobs;
        if (o_alpha->count()) plan.params.alpha_base = flags.params.alpha_base;
        if (o_eta->count()) plan.params.eta = flags.params.eta;
        if (o_out->count()) plan.output_dir = flags.output_dir;
        if (o_scope->count()) plan.c_scope = parse_scope(scope);
        if (o_sprt->count()) plan.sprt = flags.sprt;
        if (o_batch->count()) plan.sprt_batch = flags.sprt_batch;
        if (o_format->count()) plan.format = parse_format(format);
        plan.workers = workers_for(o_workers, workers, plan.workers);
        validate(plan);

        const auto m = run_matrix(plan, &err);
        switch (plan.format) {
            case OutputFormat::text: {
                out << report::summary_table(m.rows);
                for (const auto& c : m.configs)
                    if (!c.error.empty()) out << "FAILED " << rule_line(c.cfg) << ": " << c.error << '\n';
                for (const auto& c : m.configs)
                    if (c.result)
                        for (const auto& block : report::alerts(*c.result, c.cfg))
                            if (block.rfind("CRITICAL", 0) == 0) out << '\n' << block;
                break;
            }
            case OutputFormat::json: out << rows_json(m); break;
            case OutputFormat::csv: out << rows_csv(m.rows); break;
        }
        if (m.failures > 0) return kExitUsage;
        return m.critical ? kExitCritical : kExitClean;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace kcd::cli
