// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "fieldest/allocation.hpp"
#include "fieldest/placement.hpp"
#include "fieldest/sweep.hpp"

using namespace fieldest;

namespace {

EstimationContext grid_context(std::size_t n) {
    EstimationContext ctx;
    ctx.sensors = unit_grid(2, n, 2.0 / static_cast<double>(n - 1));
    ctx.lower_set = box_lower_set(2, static_cast<int>(n) - 1);
    return ctx;
}

void gain_map_bench(benchmark::State& state, bool parallel) {
    const auto ctx = grid_context(static_cast<std::size_t>(state.range(0)));
    GridSpec g{{41, 41}, {{0.0, 2.0}, {0.0, 2.0}}};
    for (auto _ : state) benchmark::DoNotOptimize(gain_map(ctx, g, SweepOptions{parallel}));
}

void BM_GainMapSerial(benchmark::State& s) { gain_map_bench(s, false); }
void BM_GainMapParallel(benchmark::State& s) { gain_map_bench(s, true); }
BENCHMARK(BM_GainMapSerial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GainMapParallel)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

const std::vector<double> kCoeffs{0.5, -0.25, 0.125, 0.125, 0.3, -0.2};
const std::vector<double> kAlloc{10, 8, 5, 5, 9, 7};

void BM_MonteCarloSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_variance_serial(kCoeffs, kAlloc, 100000, 7, NoiseScaling::Quantum));
}
void BM_MonteCarloParallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_variance(kCoeffs, kAlloc, 100000, 7, NoiseScaling::Quantum));
}
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Unit(benchmark::kMillisecond);

// Staircase with permuted axis values.
PointSet staircase() {
    std::vector<Point> pts;
    const double xs[] = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6 - i; ++j) pts.push_back({xs[(i * 5 + 2) % 6], xs[(j * 5 + 3) % 6]});
    }
    return PointSet(2, std::move(pts));
}

void relabel_bench(benchmark::State& state, bool parallel) {
    const PointSet x = staircase();
    RelabelSearchOptions opts;
    opts.parallel = parallel;
    for (auto _ : state) benchmark::DoNotOptimize(find_lower_set_relabeling(x, opts));
}
void BM_RelabelSerial(benchmark::State& s) { relabel_bench(s, false); }
void BM_RelabelParallel(benchmark::State& s) { relabel_bench(s, true); }
BENCHMARK(BM_RelabelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelabelParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
