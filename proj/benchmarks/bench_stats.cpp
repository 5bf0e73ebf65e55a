#include <benchmark/benchmark.h>

#include <vector>

#include "kcd/rng.hpp"
#include "kcd/stats.hpp"

namespace {

using namespace kcd;

std::vector<double> uniform_pvalues(std::size_t n) {
    SplitMix64 g(7);
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(g() >> 11) * 0x1.0p-53;
    return v;
}

void BM_Binomial(benchmark::State& st) {
    const double p = 1.0 / 65280.0;
    std::uint64_t k = 60;
    for (auto _ : st) {
        benchmark::DoNotOptimize(stats::binomial_two_sided(k, 5'000'000, p));
        k = k == 110 ? 60 : k + 1;
    }
}
BENCHMARK(BM_Binomial);

void BM_BenjaminiHochberg(benchmark::State& st) {
    const auto p = uniform_pvalues(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(stats::benjamini_hochberg(p));
}
BENCHMARK(BM_BenjaminiHochberg)->Arg(65'280)->Unit(benchmark::kMicrosecond);

void BM_ShapiroWilk(benchmark::State& st) {
    SplitMix64 g(3);
    std::vector<double> x(static_cast<std::size_t>(st.range(0)));
    for (auto& v : x) v = static_cast<double>(g() % 1000);
    for (auto _ : st) benchmark::DoNotOptimize(stats::shapiro_wilk(x));
}
BENCHMARK(BM_ShapiroWilk)->Arg(100)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_DistributionSummary(benchmark::State& st) {
    SplitMix64 g(5);
    std::vector<std::uint64_t> c(65'280);
    for (auto& v : c) v = 60 + g() % 35;
    for (auto _ : st) benchmark::DoNotOptimize(stats::distribution_summary(c, 65'280, 76.6));
}
BENCHMARK(BM_DistributionSummary)->Unit(benchmark::kMillisecond);

}  // namespace
