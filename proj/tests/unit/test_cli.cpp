#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "kcd/cli/app.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kcd;
using namespace kcd::cli;

constexpr const char* kKey = "8899aabbccddeeff0011223344556677fedcba98765432100123456789abcdef";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "kuzcd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(std::string_view name) : path_(fs::temp_directory_path() / name) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

class EnvGuard {
public:
    explicit EnvGuard(const char* value) {
        if (value)
            ::setenv("KUZCD_WORKERS", value, 1);
        else
            ::unsetenv("KUZCD_WORKERS");
    }
    ~EnvGuard() { ::unsetenv("KUZCD_WORKERS"); }
};

TEST(Cli, EncryptDecryptReferenceVector) {
    auto r = invoke({"encrypt", "--key", kKey, "1122334455667700ffeeddccbbaa9988"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "7f679d90bebc24305a468d42b9d4edcd\n");
    r = invoke({"decrypt", "--key", kKey, "--block", "7f679d90bebc24305a468d42b9d4edcd"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1122334455667700ffeeddccbbaa9988\n");
    r = invoke({"encrypt", "--key", kKey, "--rounds", "5", "1122334455667700ffeeddccbbaa9988"});
    EXPECT_EQ(r.out, "ae506924c8ce331bb918fc5bdfb195fa\n");
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({"encrypt", "--key", kKey, "11223344556677zz"}).code, kExitUsage);
    EXPECT_EQ(invoke({"encrypt", "--key", "abcd", "1122334455667700ffeeddccbbaa9988"}).code, kExitUsage);
    EXPECT_EQ(invoke({"encrypt", "--key", kKey, "--rounds", "10", "1122334455667700ffeeddccbbaa9988"}).code,
              kExitUsage);
    EXPECT_EQ(invoke({}).code, kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(invoke({"analyze", "--c", "00", "--trials", "10"}).code, kExitUsage);
    EXPECT_EQ(invoke({"analyze", "--mask", "nonsense", "--trials", "10"}).code, kExitUsage);
    EXPECT_EQ(invoke({"analyze", "--trials", "0"}).code, kExitUsage);
    const auto bad = invoke({"encrypt", "--key", kKey, "11223344556677zz"});
    EXPECT_FALSE(bad.err.empty());
    EXPECT_EQ(invoke({"--help"}).code, kExitClean);
}

TEST(Cli, CduTable) {
    auto r = invoke({"cdu-table", "--target", "sbox-inv", "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1,0x01,8\n"), std::string::npos);
    EXPECT_NE(r.out.find("2,0x02,9\n"), std::string::npos);
    EXPECT_NE(r.out.find("225,0xe1,9\n"), std::string::npos);
    r = invoke({"cdu-table", "--target", "sbox", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["delta"]["0x02"].get<int>(), 64);
    EXPECT_EQ(j["delta"]["0x01"].get<int>(), 8);

    TempDir dir("kcd_cli_perm");
    std::ostringstream ident;
    for (int i = 0; i < 256; ++i) ident << i << (i % 16 == 15 ? '\n' : ' ');
    const auto file = dir.path() / "id.txt";
    report::write_file(file, ident.str());
    r = invoke({"cdu-table", "--target", file.string(), "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1,0x01,256\n"), std::string::npos);
    report::write_file(file, "1 2 3");
    EXPECT_EQ(invoke({"cdu-table", "--target", file.string()}).code, kExitUsage);
}

TEST(Cli, AnalyzeWritesEveryConfiguration) {
    TempDir dir("kcd_cli_matrix");
    // sparse byte/byte maps at tiny trial counts can raise genuine alerts, so only usage errors fail here
    const auto r = invoke({"analyze", "--rounds", "3", "--rounds", "4", "--c", "01", "--c", "91", "--mask",
                           "byte_0_in->byte_0_out", "--mask", "in=4;out=4", "--trials", "3000", "--workers", "1",
                           "--out", dir.str()});
    EXPECT_NE(r.code, kExitUsage) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path())) files += e.is_regular_file();
    EXPECT_EQ(files, 2u * 2u * 2u * 3u + 1u);
    EXPECT_TRUE(fs::exists(dir.path() / "3r_0x91_byte_0_in_to_byte_0_out.json"));
    EXPECT_TRUE(fs::exists(dir.path() / "summary.txt"));
    EXPECT_NE(r.out.find("Configuration"), std::string::npos);
}

TEST(Cli, AnalyzeCriticalExitCode) {
    TempDir dir("kcd_cli_critical");
    const auto r = invoke({"analyze", "--rounds", "1", "--c", "01", "--mask", "byte_2_in->byte_2_out", "--trials",
                           "50000", "--out", dir.str()});
    EXPECT_EQ(r.code, kExitCritical);
    EXPECT_NE(r.out.find("CRITICAL ALERT"), std::string::npos);
    EXPECT_NE(r.out.find("FDR*"), std::string::npos);
}

TEST(Cli, AnalyzeQuietRunExitsClean) {
    TempDir dir("kcd_cli_quiet");
    const auto r = invoke({"analyze", "--rounds", "9", "--c", "04", "--mask", "in=0;out=0", "--trials", "24000",
                           "--out", dir.str(), "--format", "csv"});
    EXPECT_EQ(r.code, kExitClean) << r.out;
    EXPECT_NE(r.out.find(",9,0x04,in=0;out=0,"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("FDR*"), std::string::npos) << r.out;
}

TEST(Cli, ConfigFileOverriddenByFlags) {
    TempDir dir("kcd_cli_config");
    const auto cfg = dir.path() / "run.json";
    report::write_file(cfg, R"({"rounds": [5], "c": ["03"], "masks": ["in=8;out=8"],
                               "trials": 2000, "seed": 5, "out": ")" + (dir.path() / "from_config").string() + R"("})");
    const auto out_dir = dir.path() / "from_flag";
    const auto r = invoke({"analyze", "--config", cfg.string(), "--trials", "1500", "--out", out_dir.string(),
                           "--format", "json"});
    ASSERT_NE(r.code, kExitUsage) << r.err;
    EXPECT_FALSE(fs::exists(dir.path() / "from_config"));
    const auto j = nlohmann::json::parse(report::read_file(out_dir / "5r_0x03_in_8_out_8.json"));
    EXPECT_EQ(j["config"]["trials"].get<int>(), 1500);
    EXPECT_EQ(j["config"]["seed"].get<int>(), 5);
    const auto summary = nlohmann::json::parse(r.out);
    EXPECT_EQ(summary["summary"].size(), 1u);

    report::write_file(cfg, R"({"trails": 5})");
    EXPECT_EQ(invoke({"analyze", "--config", cfg.string()}).code, kExitUsage);
}

TEST(Cli, WorkersPrecedence) {
    TempDir dir("kcd_cli_workers");
    const std::vector<std::string> base{"analyze", "--rounds", "5", "--c", "02", "--mask", "in=0;out=0",
                                        "--trials", "3000", "--out", dir.str(), "--format", "csv"};
    {
        EnvGuard env("not-a-number");
        EXPECT_EQ(invoke(base).code, kExitUsage);
        auto with_flag = base;
        with_flag.insert(with_flag.end(), {"--workers", "2"});
        EXPECT_NE(invoke(with_flag).code, kExitUsage);
    }
    std::string one, three;
    {
        EnvGuard env("1");
        ASSERT_NE(invoke(base).code, kExitUsage);
        one = report::read_file(dir.path() / "5r_0x02_in_0_out_0.json");
    }
    {
        EnvGuard env("3");
        ASSERT_NE(invoke(base).code, kExitUsage);
        three = report::read_file(dir.path() / "5r_0x02_in_0_out_0.json");
    }
    EXPECT_EQ(one, three);
}

TEST(Cli, SeedDerivedKeyIsStableAndRecorded) {
    EXPECT_EQ(derive_master_key(1), derive_master_key(1));
    EXPECT_NE(derive_master_key(1), derive_master_key(2));
    RunPlan plan;
    plan.seed = 9;
    EXPECT_EQ(resolve_key(plan), derive_master_key(9));
    plan.master_key = MasterKey::from_hex(kKey);
    EXPECT_EQ(resolve_key(plan).to_hex(), kKey);
}

TEST(Cli, ExpandOrderAndScope) {
    RunPlan plan;
    plan.rounds_list = {1, 2};
    plan.c_list = {0x02, 0x03};
    plan.mask_list = {sampler::byte_mask(0, 0), sampler::byte_mask(2, 2)};
    plan.trials = 10;
    const auto all = expand(plan);
    ASSERT_EQ(all.size(), 8u);
    EXPECT_EQ(all[0].rounds, 1);
    EXPECT_EQ(all[1].masks.name, "byte_2_in->byte_2_out");
    EXPECT_EQ(report::scalar_c(all[2]), 0x03);
    EXPECT_EQ(all[4].rounds, 2);
    EXPECT_EQ(all[0].c_vector, sampler::broadcast_c(0x02));
    plan.c_scope = CScope::active;
    const auto act = expand(plan);
    EXPECT_EQ(act[0].c_vector, sampler::masked_c(0x02, plan.mask_list[0].input));
}

TEST(Cli, ParseHelpers) {
    EXPECT_EQ(parse_c("e1"), 0xE1);
    EXPECT_EQ(parse_c("0xBE"), 0xBE);
    EXPECT_THROW(parse_c("0"), std::invalid_argument);
    EXPECT_THROW(parse_c("100"), std::invalid_argument);
    EXPECT_EQ(parse_u64("5000000", "trials"), 5'000'000u);
    EXPECT_THROW(parse_u64("-1", "trials"), std::invalid_argument);
}

TEST(Cli, SprtScan) {
    const auto r = invoke({"sprt-scan", "--rounds", "1", "--c", "01", "--mask", "byte_2_in->byte_2_out",
                           "--max-trials", "2000000", "--batch", "200000", "--format", "json"});
    ASSERT_EQ(r.code, kExitClean) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["decision"], "accept_h1");
}

}  // namespace
