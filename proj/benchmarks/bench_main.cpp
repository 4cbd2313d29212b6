#include <benchmark/benchmark.h>

#include "gqic/gqic.hpp"

using namespace gqic;

namespace {

SamplePath bench_path(std::size_t n, double h) {
  auto cfg = case_config("i");
  cfg.grid = {{h, static_cast<double>(n) * h}};
  return simulate_replication(cfg, cfg.grid[0], 0);
}

void BM_Increments(benchmark::State& state) {
  const auto spec = case_config(state.range(0) == 0 ? "i" : "ii").noise;
  RngStream rng(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(increments(spec, 10000, 0.01, rng));
  state.SetItemsProcessed(state.iterations() * 10000);
  state.SetLabel(state.range(0) == 0 ? "nig" : "bilateral_gamma");
}
BENCHMARK(BM_Increments)->Arg(0)->Arg(1);

void BM_EulerPath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bench_path(n, 0.01));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerPath)->Arg(1000)->Arg(10000);

void BM_H1(benchmark::State& state) {
  const auto p = bench_path(static_cast<std::size_t>(state.range(0)), 0.005);
  const auto c = registry("Scale4");
  const double g[] = {3.0, 0.1, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(h1(p, c, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_H1)->Arg(1000)->Arg(10000);

void BM_FitScale(benchmark::State& state) {
  const auto p = bench_path(5000, 0.01);
  const auto c = registry(state.range(0) == 2 ? "Scale2" : "Scale4");
  for (auto _ : state) benchmark::DoNotOptimize(fit_scale(p, c));
  state.SetLabel(c.name);
}
BENCHMARK(BM_FitScale)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_StepwiseSelect(benchmark::State& state) {
  const auto p = bench_path(5000, 0.01);
  std::vector<Coefficient> scales, drifts;
  for (const char* s : {"Scale1", "Scale2", "Scale3", "Scale4"}) scales.push_back(registry(s));
  for (const char* d : {"Drift1", "Drift2", "Drift3"}) drifts.push_back(registry(d));
  for (auto _ : state)
    benchmark::DoNotOptimize(stepwise_select(p, scales, drifts, ScaleCriterionKind::GQBIC1,
                                             DriftCriterionKind::GQBIC2));
}
BENCHMARK(BM_StepwiseSelect)->Unit(benchmark::kMillisecond);

void BM_WeightedChisqTail(benchmark::State& state) {
  Eigen::VectorXd lam(3);
  lam << 0.2, 0.5, 1.0;
  RngStream rng(3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_chisq_tail(lam, 2.0, 100000, rng));
}
BENCHMARK(BM_WeightedChisqTail)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
