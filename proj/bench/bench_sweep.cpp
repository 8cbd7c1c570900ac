// Serial reference vs OpenMP kernels on a small atlas and a short rescaling run.

#include <benchmark/benchmark.h>

#include "dlorenz/atlas.hpp"
#include "dlorenz/rescaling.hpp"

using namespace dlorenz;

namespace {

SweepConfig bench_config() {
  SweepConfig cfg;
  cfg.M1 = {-0.5, 0.5, 8};
  cfg.M2 = {0.5, 1.1, 8};
  cfg.B = {0.5, 1.0, 4};
  cfg.iterations = 20000;
  cfg.transient = 2000;
  return cfg;
}

void BM_SweepSerial(benchmark::State& st) {
  const SweepConfig cfg = bench_config();
  for (auto _ : st) benchmark::DoNotOptimize(sweep_grid_serial(cfg));
  st.SetItemsProcessed(st.iterations() * cfg.cell_count());
}

void BM_SweepParallel(benchmark::State& st) {
  const SweepConfig cfg = bench_config();
  for (auto _ : st) benchmark::DoNotOptimize(sweep_grid(cfg));
  st.SetItemsProcessed(st.iterations() * cfg.cell_count());
}

void BM_ConvergenceSerial(benchmark::State& st) {
  const Model m = default_model(TangencyCase::CaseI);
  for (auto _ : st) benchmark::DoNotOptimize(convergence_report_serial(10, 16, {0, 0}, TangencyCase::CaseI, m));
}

void BM_ConvergenceParallel(benchmark::State& st) {
  const Model m = default_model(TangencyCase::CaseI);
  for (auto _ : st) benchmark::DoNotOptimize(convergence_report(10, 16, {0, 0}, TangencyCase::CaseI, m));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvergenceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvergenceParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
