// Each kernel next to its serial reference. Thread count follows OMP_NUM_THREADS.

#include "lrx/analysis.hpp"
#include "lrx/bellman.hpp"
#include "lrx/exact_search.hpp"
#include "lrx/rng.hpp"
#include "lrx/state_index.hpp"
#include "lrx/tropical.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace lrx;

const GraphSpec kFull9{GraphKind::FullCayley, 9, false};

void BM_NeighborTable(benchmark::State& st) {
    StateIndexer idx(kFull9);
    for (auto _ : st) benchmark::DoNotOptimize(build_neighbor_table(idx));
}
void BM_NeighborTableSerial(benchmark::State& st) {
    StateIndexer idx(kFull9);
    for (auto _ : st) benchmark::DoNotOptimize(serial::build_neighbor_table(idx));
}

void BM_Bfs(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(bfs(kFull9));
}
void BM_BfsSerial(benchmark::State& st) {
    const auto start = target_entries(kFull9);
    for (auto _ : st) benchmark::DoNotOptimize(serial::bfs_profile(kFull9, start));
}

DpConfig dp_config() {
    DpConfig cfg;
    cfg.init = parse_init_tag("hamming");
    return cfg;
}
void BM_Dp(benchmark::State& st) {
    const GraphSpec spec{GraphKind::FullCayley, 8, false};
    const auto cfg = dp_config();
    for (auto _ : st) benchmark::DoNotOptimize(dp_solve(spec, cfg));
}
void BM_DpSerial(benchmark::State& st) {
    const GraphSpec spec{GraphKind::FullCayley, 8, false};
    const auto cfg = dp_config();
    for (auto _ : st) benchmark::DoNotOptimize(serial::dp_solve(spec, cfg));
}

void BM_MinPlus(benchmark::State& st) {
    const auto a = tropical_adjacency(GraphSpec{GraphKind::FullCayley, 6, false});
    const auto a2 = min_plus(a, a);
    for (auto _ : st) benchmark::DoNotOptimize(min_plus(a2, a2));
}
void BM_MinPlusSerial(benchmark::State& st) {
    const auto a = tropical_adjacency(GraphSpec{GraphKind::FullCayley, 6, false});
    const auto a2 = serial::min_plus(a, a);
    for (auto _ : st) benchmark::DoNotOptimize(serial::min_plus(a2, a2));
}

std::vector<double> random_symmetric(std::size_t size) {
    SplitMix64 rng(1);
    std::vector<double> a(size * size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j <= i; ++j) a[i * size + j] = a[j * size + i] = rng.normal();
    return a;
}
void BM_Jacobi(benchmark::State& st) {
    const auto a = random_symmetric(120);
    for (auto _ : st) benchmark::DoNotOptimize(jacobi_eigenvalues(a, 120));
}
void BM_JacobiSerial(benchmark::State& st) {
    const auto a = random_symmetric(120);
    for (auto _ : st) benchmark::DoNotOptimize(serial::jacobi_eigenvalues(a, 120));
}

} // namespace

BENCHMARK(BM_NeighborTable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NeighborTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bfs)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BfsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DpSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinPlus)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinPlusSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jacobi)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
