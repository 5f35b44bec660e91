#include <benchmark/benchmark.h>

#include "adherence/features.hpp"
#include "adherence/ingest.hpp"
#include "adherence/pipeline.hpp"
#include "adherence/synthgen.hpp"

using namespace adherence;

namespace {

GeneratorConfig fleet_config(std::int64_t units) {
  GeneratorConfig g;
  g.n_units = static_cast<std::size_t>(units);
  g.seed = 4;
  return g;
}

void BM_Generate(benchmark::State& state) {
  const GeneratorConfig g = fleet_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_fleet(g));
}
BENCHMARK(BM_Generate)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LabelFleet(benchmark::State& state) {
  const GeneratedFleet f = generate_fleet(fleet_config(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(label_fleet(f.records, f.as_of));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.records.drops.size()));
}
BENCHMARK(BM_LabelFleet)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_LoadCsv(benchmark::State& state) {
  const GeneratedFleet f = generate_fleet(fleet_config(state.range(0)));
  const FleetCsv csv = to_csv(f);
  for (auto _ : state) {
    const RawTables t = load_tables_from_text(csv.drops, csv.schedule, csv.units, f.as_of);
    benchmark::DoNotOptimize(to_records(clean(t).tables, f.as_of));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(csv.drops.size()));
}
BENCHMARK(BM_LoadCsv)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_WindowRows(benchmark::State& state) {
  const GeneratedFleet f = generate_fleet(fleet_config(2000));
  const FleetLabels labels = label_fleet(f.records, f.as_of);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const auto rows = fleet_rows(labels, k);
    benchmark::DoNotOptimize(FeatureSchema::fit(rows, k).encode(rows));
  }
}
BENCHMARK(BM_WindowRows)->Arg(6)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
