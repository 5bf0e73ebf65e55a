#include <benchmark/benchmark.h>

#include "kcd/cdiff.hpp"
#include "kcd/cipher.hpp"
#include "kcd/gf256.hpp"

namespace {

using namespace kcd;

const MasterKey kKey = MasterKey::from_hex("8899aabbccddeeff0011223344556677fedcba98765432100123456789abcdef");

void BM_KeySchedule(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(cipher::key_schedule(kKey));
}
BENCHMARK(BM_KeySchedule);

void BM_Encrypt(benchmark::State& st) {
    const cipher::Kuznyechik k(kKey);
    const int rounds = static_cast<int>(st.range(0));
    State x = State::from_hex("1122334455667700ffeeddccbbaa9988");
    for (auto _ : st) {
        x = k.encrypt_unchecked(x, rounds);
        benchmark::DoNotOptimize(x);
    }
    st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Encrypt)->Arg(1)->Arg(5)->Arg(9);

void BM_Decrypt(benchmark::State& st) {
    const cipher::Kuznyechik k(kKey);
    State x = State::from_hex("7f679d90bebc24305a468d42b9d4edcd");
    for (auto _ : st) {
        x = k.decrypt(x);
        benchmark::DoNotOptimize(x);
    }
    st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Decrypt);

// Table-driven L against sixteen R steps.
void BM_LinearTable(benchmark::State& st) {
    State x = State::from_hex("1122334455667700ffeeddccbbaa9988");
    for (auto _ : st) {
        x = cipher::linear_l(x);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_LinearTable);

void BM_LinearComposed(benchmark::State& st) {
    State x = State::from_hex("1122334455667700ffeeddccbbaa9988");
    for (auto _ : st) {
        x = cipher::linear_l_composed(x);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_LinearComposed);

void BM_InnerCddt(benchmark::State& st) {
    const auto& s = cipher::sbox_table();
    std::uint8_t c = 2;
    for (auto _ : st) {
        benchmark::DoNotOptimize(cdiff::inner_cddt(s, c));
        c = static_cast<std::uint8_t>(c == 255 ? 2 : c + 1);
    }
}
BENCHMARK(BM_InnerCddt);

void BM_FullSpectrum(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(cdiff::full_spectrum(cipher::sbox_table(), cdiff::Orientation::inner));
}
BENCHMARK(BM_FullSpectrum)->Unit(benchmark::kMillisecond);

void BM_GfMulTableBuild(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(gf256::build_mul_table());
}
BENCHMARK(BM_GfMulTableBuild)->Unit(benchmark::kMicrosecond);

}  // namespace
