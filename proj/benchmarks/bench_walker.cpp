#include <benchmark/benchmark.h>

#include "walklab/replication.hpp"
#include "walklab/walker.hpp"

using namespace walklab;

namespace {

Schedule single_checkpoint(std::int64_t n) {
    ScheduleSpec spec;
    spec.kind = ScheduleKind::Explicit;
    spec.explicit_terms = {n};
    spec.count = 1;
    spec.start_index = 1;
    return build_schedule(spec, NormalizerKind::Count);
}

void BM_RademacherSteps(benchmark::State& state) {
    auto dist = StepDistribution::simple_walk(1);
    Schedule sched = single_checkpoint(state.range(0));
    std::uint64_t replica = 0;
    for (auto _ : state) {
        RngStream stream(42, replica++);
        auto wc = run_checkpoints(dist, sched, stream);
        benchmark::DoNotOptimize(wc.positions[0][0]);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RademacherSteps)->Arg(1 << 16)->Arg(1 << 20);

void BM_PlanarSimpleSteps(benchmark::State& state) {
    auto dist = StepDistribution::simple_walk(2);
    Schedule sched = single_checkpoint(state.range(0));
    std::uint64_t replica = 0;
    for (auto _ : state) {
        RngStream stream(43, replica++);
        auto wc = run_checkpoints(dist, sched, stream);
        benchmark::DoNotOptimize(wc.positions[0][0]);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PlanarSimpleSteps)->Arg(1 << 16);

void BM_GaussianSteps(benchmark::State& state) {
    auto dist = StepDistribution::gaussian(Mat::identity(2));
    Schedule sched = single_checkpoint(state.range(0));
    std::uint64_t replica = 0;
    for (auto _ : state) {
        RngStream stream(44, replica++);
        auto wc = run_checkpoints(dist, sched, stream);
        benchmark::DoNotOptimize(wc.positions[0][0]);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianSteps)->Arg(1 << 14);

void BM_MinTracker(benchmark::State& state) {
    auto dist = StepDistribution::simple_walk(2);
    std::uint64_t replica = 0;
    for (auto _ : state) {
        RngStream stream(45, replica++);
        auto t = run_min_tracker(dist, Vec{0.5, 0.5}, 0.1, state.range(0), stream);
        benchmark::DoNotOptimize(t.running_min);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinTracker)->Arg(1 << 14);

void BM_SmallExperiment(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.dist = StepDistribution::simple_walk(1);
    cfg.schedule_spec.kind = ScheduleKind::PowerLaw;
    cfg.schedule_spec.beta = 3.0;
    cfg.schedule_spec.start_index = 2;
    cfg.schedule_spec.count = 20;
    cfg.target.mode = TargetMode::AlphaWindow;
    cfg.target.a = Vec{0.0};
    cfg.target.alpha = 1.0 / 6.0;
    cfg.form = TheoremForm::T2aWindow;
    cfg.replicas = 50;
    cfg.workers = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.master_seed = seed++;
        auto agg = run_experiment(cfg);
        benchmark::DoNotOptimize(agg.cell(0, 0).sum_hits);
    }
}
BENCHMARK(BM_SmallExperiment);

} // namespace

BENCHMARK_MAIN();
