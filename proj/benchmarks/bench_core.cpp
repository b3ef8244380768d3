#include "cointvar/backtest.hpp"
#include "cointvar/simulate.hpp"
#include "cointvar/vecm.hpp"

#include <benchmark/benchmark.h>

using namespace cointvar;

namespace {

const Matrix& sample() {
  static const Matrix values = generate(reference_dgp(20000, 1)).values();
  return values;
}

void BM_FitVar(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const Matrix y = sample().topRows(window);
  for (auto _ : state) benchmark::DoNotOptimize(fit_var(y, p, kConstantTerm));
}
BENCHMARK(BM_FitVar)->ArgsProduct({{96, 768, 3072}, {1, 7}});

void BM_JohansenAllRanks(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const Matrix y = sample().topRows(window);
  for (auto _ : state) {
    JohansenEstimator est(y, p, kConstantTerm);
    for (int r = 0; r <= 4; ++r) benchmark::DoNotOptimize(est.model(r));
  }
}
BENCHMARK(BM_JohansenAllRanks)->ArgsProduct({{96, 768, 3072}, {1, 7}});

void BM_ForecastVecm(benchmark::State& state) {
  const Matrix y = sample().topRows(768);
  const VecmModel m = fit_vecm(y, 7, 2, kConstantTerm);
  for (auto _ : state) benchmark::DoNotOptimize(forecast_vecm(m, y, 8));
}
BENCHMARK(BM_ForecastVecm);

void BM_RunCell(benchmark::State& state) {
  const Matrix& y = sample();
  const auto origins = sample_origins(y.rows(), 768, 8, 100, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(y, {768, 2, 2}, origins, 8, kConstantTerm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(origins.size()));
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

void BM_RunGrid(benchmark::State& state) {
  const TimeSeriesPanel panel = generate(reference_dgp(5000, 1));
  BacktestConfig config;
  config.windows = {96, 768};
  config.orders = {1, 4, 7};
  config.origins = 50;
  config.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_grid(panel, config));
}
BENCHMARK(BM_RunGrid)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
