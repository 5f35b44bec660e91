#include <benchmark/benchmark.h>
#include <cmath>

#include "adherence/features.hpp"
#include "adherence/metrics.hpp"
#include "adherence/rng.hpp"

using namespace adherence;

namespace {

void scored(std::size_t n, std::vector<double>& s, std::vector<int>& y) {
  Rng rng(1);
  s.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.7);
    // rounded so a realistic share of scores tie
    s[i] = std::round((rng.normal() + y[i]) * 100.0) / 100.0;
  }
}

void BM_RocAuc(benchmark::State& state) {
  std::vector<double> s;
  std::vector<int> y;
  scored(static_cast<std::size_t>(state.range(0)), s, y);
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(s, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(10)->Range(1000, 1000000);

void BM_RocCurve(benchmark::State& state) {
  std::vector<double> s;
  std::vector<int> y;
  scored(static_cast<std::size_t>(state.range(0)), s, y);
  for (auto _ : state) benchmark::DoNotOptimize(roc_curve(s, y));
}
BENCHMARK(BM_RocCurve)->Arg(100000);

void BM_InfoGain(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<int>(rng.index(4));
    y[i] = rng.bernoulli(0.5);
  }
  for (auto _ : state) benchmark::DoNotOptimize(info_gain<int>(x, y));
}
BENCHMARK(BM_InfoGain)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
