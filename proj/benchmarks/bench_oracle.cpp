#include <benchmark/benchmark.h>

#include "walklab/estimators.hpp"
#include "walklab/gaussian.hpp"
#include "walklab/oracle.hpp"

using namespace walklab;

namespace {

void BM_ExactBinomial(benchmark::State& state) {
    std::int64_t n = state.range(0);
    std::int64_t k = n / 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_binomial_prob(n, k).value);
        if (++k > n / 2 + 40) k = n / 2 - 40;
    }
}
BENCHMARK(BM_ExactBinomial)->Arg(100)->Arg(1'000'000);

void BM_WindowSum(benchmark::State& state) {
    std::int64_t n = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(simple1d_window_prob(n, 0.5, 1.0 / 6.0));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WindowSum)->Arg(1'000'000);

void BM_BoxProbabilityDiagonal(benchmark::State& state) {
    Mat sigma(2);
    sigma(0, 0) = 4.0;
    sigma(1, 1) = 1.0;
    Vec a{0.5, -0.5};
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_box_probability(a, 0.7, sigma));
}
BENCHMARK(BM_BoxProbabilityDiagonal);

void BM_BoxProbabilityCorrelated(benchmark::State& state) {
    Mat sigma(2);
    sigma(0, 0) = 2.0;
    sigma(0, 1) = sigma(1, 0) = 0.9;
    sigma(1, 1) = 1.0;
    Vec a{0.5, -0.5};
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_box_probability(a, 0.7, sigma));
}
BENCHMARK(BM_BoxProbabilityCorrelated);

void BM_ExpectedHitsWindow(benchmark::State& state) {
    ScheduleSpec spec;
    spec.kind = ScheduleKind::PowerLaw;
    spec.beta = 3.0;
    spec.start_index = 2;
    spec.count = 99;
    Schedule sched = build_schedule(spec, NormalizerKind::LogCount);
    TargetSpec target;
    target.mode = TargetMode::AlphaWindow;
    target.a = Vec{0.0};
    target.alpha = 1.0 / 6.0;
    auto dist = StepDistribution::simple_walk(1);
    for (auto _ : state) benchmark::DoNotOptimize(expected_hits(sched, target, dist).total.value);
}
BENCHMARK(BM_ExpectedHitsWindow);

} // namespace
