#include <benchmark/benchmark.h>

#include "gspq/funcquant.hpp"
#include "gspq/gauss1d.hpp"
#include "gspq/mc.hpp"
#include "gspq/spectrum.hpp"

using namespace gspq;

namespace {

const DistortionTable& table() {
    static const DistortionTable t(1024);
    return t;
}

void BM_SpectrumBatch(benchmark::State& state) {
    const ProcessParams p(0.5, 1.0);
    const auto count = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_batch(p, count));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpectrumBatch)->Arg(1000)->Arg(100000);

void BM_RootGrid(benchmark::State& state) {
    for (auto _ : state) {
        for (int i = 0; i < 100; ++i) benchmark::DoNotOptimize(spectrum_batch({0.01 * i, 1.0}, 1000));
    }
}
BENCHMARK(BM_RootGrid)->Unit(benchmark::kMillisecond);

void BM_ScalarOptimize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(optimize(n));
}
BENCHMARK(BM_ScalarOptimize)->Arg(16)->Arg(256)->Arg(1024);

void BM_DistortionTable(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(DistortionTable(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DistortionTable)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Allocate(benchmark::State& state) {
    const Spectrum s = spectrum_batch({0.5, 1.0}, 64);
    const auto method = state.range(1) ? AllocMethod::greedy : AllocMethod::exhaustive;
    table();
    for (auto _ : state) benchmark::DoNotOptimize(allocate(s, state.range(0), method, table()));
}
BENCHMARK(BM_Allocate)->Args({256, 0})->Args({16384, 0})->Args({16384, 1});

void BM_MonteCarlo(benchmark::State& state) {
    const Spectrum s = spectrum_batch({0.5, 1.0}, 1000);
    const ProductQuantizer pq = build(s, allocate(s, state.range(0), AllocMethod::exhaustive, table()), table());
    McConfig cfg;
    cfg.samples = 100000;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_distortion(pq, cfg));
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_MonteCarlo)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PathSpaceCheck(benchmark::State& state) {
    const Spectrum s = spectrum_batch({0.5, 1.0}, 64);
    const ProductQuantizer pq = build(s, allocate(s, 16, AllocMethod::exhaustive, table()), table());
    McConfig cfg;
    cfg.samples = 100;
    cfg.truncation = 20;
    for (auto _ : state) benchmark::DoNotOptimize(path_space_check(pq, cfg));
}
BENCHMARK(BM_PathSpaceCheck)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
