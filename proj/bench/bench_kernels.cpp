// Serial reference vs OpenMP paths of the batch kernels.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "pcsim/dpc.hpp"
#include "pcsim/orchestrator.hpp"
#include "pcsim/parallel.hpp"

using namespace pcsim;

namespace {

Execution exec_of(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) ? "parallel x" + std::to_string(max_threads()) : "serial");
}

void BM_EvaluateBatch(benchmark::State& state) {
    const auto batch = generate_batch(10, 2000, 1).scenarios;
    std::vector<PowerVector> powers;
    for (const auto& s : batch) powers.push_back(s.p_init);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(batch, powers, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
    label(state);
}
BENCHMARK(BM_EvaluateBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AnalyzeBatch(benchmark::State& state) {
    const auto batch = generate_batch(10, 500, 1).scenarios;
    for (auto _ : state) benchmark::DoNotOptimize(analyze_batch(batch, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
    label(state);
}
BENCHMARK(BM_AnalyzeBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MeanGeneratedGain(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(mean_generated_gain(1, 10, 2000, exec_of(state)));
    label(state);
}
BENCHMARK(BM_MeanGeneratedGain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    SweepConfig c;
    c.scenarios_per_count = 10;
    c.seed = 1;
    c.execution = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(sweep(c));
    label(state);
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
