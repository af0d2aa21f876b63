#include <benchmark/benchmark.h>

#include "ccbeam/experiment_config.hpp"

namespace {

ccbeam::ExperimentConfig small_cdf_run() {
  auto ex = ccbeam::preset_scenario("cdf-fig4to6").experiment;
  ex.trials = 32;
  ex.restarts = 1;
  return ex;
}

void BM_Serial(benchmark::State& state) {
  const auto ex = small_cdf_run();
  for (auto _ : state) {
    auto res = ccbeam::run_experiment_serial(ex);
    benchmark::DoNotOptimize(res.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * ex.trials);
}
BENCHMARK(BM_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Parallel(benchmark::State& state) {
  const auto ex = small_cdf_run();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto res = ccbeam::run_experiment(ex, workers);
    benchmark::DoNotOptimize(res.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * ex.trials);
}
BENCHMARK(BM_Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
