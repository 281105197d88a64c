#include <benchmark/benchmark.h>

#include "sampcorr/generators.hpp"
#include "sampcorr/isotonic.hpp"
#include "sampcorr/mono_correct.hpp"
#include "sampcorr/uniformity.hpp"

using namespace sampcorr;

namespace {

Pmf bumped(std::size_t n) {
    CounterRng rng(1);
    return perturb_to_distance(gen_zipf_monotone(n, 1.0), 0.05, rng, 1e-6).pmf;
}

void BM_ClosestMonotone(benchmark::State& state) {
    const Pmf d = bumped(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(closest_monotone_pmf(d));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClosestMonotone)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_DistanceDual(benchmark::State& state) {
    const Pmf d = bumped(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(distance_to_monotone_exact(d));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceDual)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Convolve(benchmark::State& state) {
    CounterRng rng(2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const Pmf p = gen_near_uniform(n, 0.2, rng), q = gen_near_uniform(n, 0.1, rng);
    for (auto _ : state) benchmark::DoNotOptimize(convolve(p, q));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(4)->Range(64, 4096);

void BM_ObliviousSample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ObliviousSampler s(n, 0.2);
    DistAccess a = DistAccess::from_pmf(gen_zipf_monotone(n, 1.0), 3);
    CounterRng rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(s.sample(a, rng));
}
BENCHMARK(BM_ObliviousSample)->Arg(1024)->Arg(1 << 16);

void BM_WaterfillSample(benchmark::State& state) {
    const std::size_t n = 1 << 14;
    const Pmf d = gen_zipf_monotone(n, 1.0);
    CounterRng rng(5);
    for (auto _ : state) {
        state.PauseTiming();
        DistAccess a = DistAccess::from_pmf(d, 6);
        state.ResumeTiming();
        WaterfillState st(a, 0.1, static_cast<std::size_t>(state.range(0)));
        for (std::int64_t i = 0; i < state.range(0); ++i) benchmark::DoNotOptimize(st.sample(rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WaterfillSample)->Arg(16)->Arg(256);

void BM_BootstrapImprove(benchmark::State& state) {
    CounterRng rng(7);
    DistAccess a = DistAccess::from_pmf(gen_near_uniform(1024, 0.25, rng), 8);
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_improve(a, 1024, 0.25, 0.05));
}
BENCHMARK(BM_BootstrapImprove);

}  // namespace

BENCHMARK_MAIN();
