#include <benchmark/benchmark.h>

#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/core/parallel.hpp"
#include "orbitchaos/kacsphere/kacsphere.hpp"
#include "orbitchaos/mixing/mixing.hpp"

using namespace orbitchaos;

static void BM_BakerIterate(benchmark::State& state) {
    const auto sys = SystemDescriptor::baker();
    auto x = PhaseSpacePoint::planar(0.1234, 0.5678);
    for (auto _ : state) {
        x = iterate(sys, x, 1);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_BakerIterate);

static void BM_CatTrajectory(benchmark::State& state) {
    const auto sys = SystemDescriptor::cat();
    SampleStream rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_trajectory(sys, rng, static_cast<int>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CatTrajectory)->Arg(16)->Arg(128);

static void BM_BakerPreimage(benchmark::State& state) {
    const auto a = DyadicRect::from_box(parse_event_set("box:0.25,0.625;0.125,0.75").as_box());
    for (auto _ : state) benchmark::DoNotOptimize(baker_preimage(a, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BakerPreimage)->Arg(4)->Arg(12)->Arg(20);

static void BM_UniformCorrelationExact(benchmark::State& state) {
    const auto sys = SystemDescriptor::baker();
    const auto a = parse_event_set("box:0,0.5;0,0.5");
    for (auto _ : state) benchmark::DoNotOptimize(uniform_correlation_exact(sys, a, a, 8, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_UniformCorrelationExact)->Arg(8)->Arg(12);

static void BM_CorrelationMc(benchmark::State& state) {
    set_worker_count(1);
    const auto sys = SystemDescriptor::baker();
    const auto a = parse_event_set("box:0,0.5;0,0.5");
    for (auto _ : state) benchmark::DoNotOptimize(correlation(sys, a, a, 4, 100'000, 1));
    state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_CorrelationMc)->Unit(benchmark::kMillisecond);

static void BM_ChaosSweep(benchmark::State& state) {
    set_worker_count(1);
    const auto sys = SystemDescriptor::cat();
    const auto g = parse_test_function("trig:cos:1,0", sys.domain());
    const NuIntegral nu{0.0, 0.0, NuProvenance::closed_form};
    for (auto _ : state) benchmark::DoNotOptimize(chaos_sweep(sys, g, kDefaultNGrid, nu, 10'000, 2));
    state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_ChaosSweep)->Unit(benchmark::kMillisecond);

static void BM_ExactDecomposition(benchmark::State& state) {
    const auto sys = SystemDescriptor::baker();
    const auto e = parse_event_set("box:0,0.5;0,0.5");
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            prop33_decomposition(sys, e, static_cast<int>(state.range(0)), DecompositionMode::exact, 0, 0));
    }
}
BENCHMARK(BM_ExactDecomposition)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SphereSample(benchmark::State& state) {
    SampleStream rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(kac::sample_sphere(static_cast<int>(state.range(0)), rng));
}
BENCHMARK(BM_SphereSample)->Arg(4)->Arg(64);
BENCHMARK_MAIN();
