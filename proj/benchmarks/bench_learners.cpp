#include <benchmark/benchmark.h>
#include <map>

#include "adherence/features.hpp"
#include "adherence/learners/model.hpp"
#include "adherence/pipeline.hpp"
#include "adherence/synthgen.hpp"

using namespace adherence;

namespace {

const Dataset& markov(std::size_t units) {
  static std::map<std::size_t, Dataset> cache;
  auto it = cache.find(units);
  if (it == cache.end()) {
    GeneratorConfig g;
    g.n_units = units;
    g.seed = 3;
    const GeneratedFleet f = generate_fleet(g.clean());
    const auto rows = fleet_rows(label_fleet(f.records, f.as_of), 6);
    it = cache.emplace(units, FeatureSchema::fit(rows, 6).encode(rows)).first;
  }
  return it->second;
}

void fit(benchmark::State& state, ModelKind kind) {
  const Dataset& d = markov(static_cast<std::size_t>(state.range(0)));
  ModelConfig c = ModelConfig::defaults(kind, 1);
  c.n_trees = 20;
  c.n_stages = 50;
  c.epochs = 5;
  for (auto _ : state) benchmark::DoNotOptimize(train_model(d, c));
  state.counters["rows"] = static_cast<double>(d.n_rows());
}

void BM_DecisionTree(benchmark::State& s) { fit(s, ModelKind::DecisionTree); }
void BM_RandomForest(benchmark::State& s) { fit(s, ModelKind::RandomForest); }
void BM_ExtraTrees(benchmark::State& s) { fit(s, ModelKind::ExtraTrees); }
void BM_GradientBoosting(benchmark::State& s) { fit(s, ModelKind::GradientBoosting); }
void BM_RegularizedBoosting(benchmark::State& s) { fit(s, ModelKind::RegularizedBoosting); }
void BM_Mlp(benchmark::State& s) { fit(s, ModelKind::Mlp); }

BENCHMARK(BM_DecisionTree)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomForest)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtraTrees)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientBoosting)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegularizedBoosting)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mlp)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_PredictForest(benchmark::State& state) {
  const Dataset& d = markov(2000);
  ModelConfig c = ModelConfig::defaults(ModelKind::RandomForest, 1);
  c.n_trees = 100;
  const TrainedModel m = train_model(d, c);
  for (auto _ : state) benchmark::DoNotOptimize(predict_proba(m, d));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.n_rows()));
}
BENCHMARK(BM_PredictForest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
