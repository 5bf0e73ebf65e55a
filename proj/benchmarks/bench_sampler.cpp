#include <benchmark/benchmark.h>

#include "kcd/analysis.hpp"
#include "kcd/sampler.hpp"

namespace {

using namespace kcd;

sampler::ExperimentConfig config(int rounds, std::uint64_t trials) {
    sampler::ExperimentConfig cfg;
    cfg.rounds = rounds;
    cfg.masks = sampler::byte_mask(8, 8);
    cfg.c_vector = sampler::broadcast_c(0x04);
    cfg.trials = trials;
    cfg.seed = 1;
    cfg.master_key = MasterKey::from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
    return cfg;
}

void BM_TrialRange(benchmark::State& st) {
    const auto cfg = config(static_cast<int>(st.range(0)), 1);
    const cipher::Kuznyechik k(cfg.master_key);
    constexpr std::uint64_t kTrials = 1 << 14;
    std::uint64_t first = 0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(sampler::run_trial_range(cfg, k, first, kTrials));
        first += kTrials;
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * kTrials));
}
BENCHMARK(BM_TrialRange)->Arg(1)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_RunTrialsWorkers(benchmark::State& st) {
    const auto cfg = config(9, 1 << 17);
    const auto workers = static_cast<unsigned>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(sampler::run_trials(cfg, workers));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * cfg.trials));
}
BENCHMARK(BM_RunTrialsWorkers)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Analyze(benchmark::State& st) {
    const auto cfg = config(9, static_cast<std::uint64_t>(st.range(0)));
    const auto freq = sampler::run_trials(cfg, 0);
    for (auto _ : st) benchmark::DoNotOptimize(analysis::analyze(freq, cfg.masks, cfg.rounds));
}
BENCHMARK(BM_Analyze)->Arg(100'000)->Arg(500'000)->Unit(benchmark::kMillisecond);

}  // namespace
