#include <benchmark/benchmark.h>

#include "stylized/stylized.hpp"
#include "synth.hpp"

using namespace stylized;

namespace {

void BM_SessionAcf(benchmark::State& state) {
  const auto r = synth::as_returns(synth::garch(static_cast<std::size_t>(state.range(0)), 0.09, 0.9, 1));
  const auto cal = SessionCalendar::always_open();
  for (auto _ : state) benchmark::DoNotOptimize(session_acf(r, cal, 96));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SessionAcf)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_SessionAcfUsEquity(benchmark::State& state) {
  const auto r = synth::as_returns(synth::gaussian(static_cast<std::size_t>(state.range(0)), 2), 3600, 1577836800);
  const auto cal = SessionCalendar::us_equity();
  for (auto _ : state) benchmark::DoNotOptimize(session_acf(r, cal, 96));
}
BENCHMARK(BM_SessionAcfUsEquity)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Leverage(benchmark::State& state) {
  const auto r = synth::as_returns(synth::gjr(static_cast<std::size_t>(state.range(0)), 0.02, 0.12, 0.9, 3));
  for (auto _ : state) benchmark::DoNotOptimize(leverage(r, 96));
}
BENCHMARK(BM_Leverage)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_PowerTailFit(benchmark::State& state) {
  const auto r = normalize(synth::as_returns(synth::pareto_symmetric(static_cast<std::size_t>(state.range(0)), 2.5, 4)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_power_tail(r, TailSide::right));
}
BENCHMARK(BM_PowerTailFit)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Tra(benchmark::State& state) {
  const auto r = synth::as_returns(synth::tra_process(static_cast<std::size_t>(state.range(0)), 5));
  const auto cal = SessionCalendar::always_open();
  for (auto _ : state) benchmark::DoNotOptimize(tra(daily_volatility(r, cal), 20));
}
BENCHMARK(BM_Tra)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_CorrelationEigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto panel = synth::one_factor_panel(1000, n, 0.5, 6);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_spectrum(correlation_matrix(panel), panel.n_times()));
}
BENCHMARK(BM_CorrelationEigen)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const auto panel = synth::one_factor_panel(500, 300, 0.4, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_spectrum(panel, 145, static_cast<std::size_t>(state.range(0)), 1, true, 0));
  }
}
BENCHMARK(BM_Bootstrap)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Clustering(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  FeatureTable t;
  const auto v = synth::gaussian(n * 10, 8);
  for (std::size_t c = 0; c < 10; ++c) t.column_names.push_back("f" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    t.row_labels.push_back("a" + std::to_string(i));
    t.rows.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(i * 10), v.begin() + static_cast<std::ptrdiff_t>(i * 10 + 10));
  }
  for (auto _ : state) benchmark::DoNotOptimize(hierarchical_cluster(stylized_distance_matrix(t), 8));
}
BENCHMARK(BM_Clustering)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ArbPool(benchmark::State& state) {
  const auto ref = synth::as_prices(synth::gaussian(static_cast<std::size_t>(state.range(0)), 9, 0.003), 600);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_arb_pool(ref, FeeTier::bp30()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ArbPool)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
