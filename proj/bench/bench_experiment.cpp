// Serial reference vs OpenMP experiment engine on the bundled reference scenario.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "topodetect/scenario.hpp"

using namespace topodetect;

namespace {

const Scenario& scenario() {
    static const Scenario sc = [] {
        auto cfg = load_scenario_config(TOPODETECT_DATA_DIR "/paper.cfg");
        cfg.repetitions = 4;
        return Scenario::prepare(cfg);
    }();
    return sc;
}

void BM_ExperimentSerial(benchmark::State& state) {
    const auto& sc = scenario();
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(sc));
    state.counters["trials/s"] = benchmark::Counter(static_cast<double>(sc.trial_count()),
                                                    benchmark::Counter::kIsIterationInvariantRate);
}

void BM_ExperimentParallel(benchmark::State& state) {
    const auto& sc = scenario();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(sc, jobs));
    state.counters["trials/s"] = benchmark::Counter(static_cast<double>(sc.trial_count()),
                                                    benchmark::Counter::kIsIterationInvariantRate);
}

void BM_StepLibrary(benchmark::State& state) {
    const auto& sc = scenario();
    int t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_step_library(sc, t, 0));
        t = (t + 1) % sc.step_count();
    }
}

void thread_counts(benchmark::internal::Benchmark* b) {
    for (int j = 1; j <= omp_get_max_threads(); j *= 2) b->Arg(j);
    if ((omp_get_max_threads() & (omp_get_max_threads() - 1)) != 0) b->Arg(omp_get_max_threads());
}

}  // namespace

BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StepLibrary)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
