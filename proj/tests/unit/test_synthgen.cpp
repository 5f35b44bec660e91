#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adherence/error.hpp"
#include "adherence/ingest.hpp"
#include "adherence/pipeline.hpp"
#include "adherence/rng.hpp"
#include "adherence/synthgen.hpp"

using namespace adherence;

namespace {

GeneratorConfig small(std::size_t n_units, std::uint64_t seed) {
  GeneratorConfig c;
  c.n_units = n_units;
  c.seed = seed;
  return c;
}

// Posterior by quadrature over the baseline, independent of the closed form.
double quadrature_posterior(const GeneratorConfig& c, const std::vector<int>& states) {
  const int n = 20000;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    double w = std::pow(p, c.alpha - 1.0) * std::pow(1.0 - p, c.beta - 1.0);
    w *= states[0] ? p : 1.0 - p;
    for (std::size_t t = 1; t < states.size(); ++t) {
      const double fresh = states[t] ? p : 1.0 - p;
      w *= (1.0 - c.stickiness) * fresh + (states[t] == states[t - 1] ? c.stickiness : 0.0);
    }
    const double next = (1.0 - c.stickiness) * p + (states.back() ? c.stickiness : 0.0);
    num += w * next;
    den += w;
  }
  return num / den;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Generator, FullStickinessGivesConstantSequences) {
  GeneratorConfig c = small(200, 1);
  c.stickiness = 1.0;
  const GeneratedFleet f = generate_fleet(c);
  std::map<std::string, std::set<int>> seen;
  for (const TruthRow& t : f.truth) seen[t.unit_id].insert(t.latent_state);
  ASSERT_EQ(seen.size(), 200u);
  for (const auto& [unit, states] : seen) EXPECT_EQ(states.size(), 1u) << unit;
}

TEST(Generator, NoStickinessSymmetricBetaIsBalanced) {
  GeneratorConfig c = small(2000, 2);
  c.stickiness = 0.0;
  c.alpha = c.beta = 3.0;
  const GeneratedFleet f = generate_fleet(c);
  double on = 0.0;
  for (const TruthRow& t : f.truth) on += t.latent_state;
  EXPECT_NEAR(on / static_cast<double>(f.truth.size()), 0.5, 0.03);
}

TEST(Generator, CleanFleetHasNoExclusionsOrQuarantine) {
  const GeneratedFleet f = generate_fleet(small(300, 3).clean());
  const FleetCsv csv = to_csv(f);
  const RawTables raw = load_tables_from_text(csv.drops, csv.schedule, csv.units, f.as_of);
  EXPECT_TRUE(raw.quarantined.empty());
  const FleetLabels labels = label_fleet(f.records, f.as_of);
  EXPECT_TRUE(labels.exclusions.empty());
}

TEST(Generator, ContaminationIsVisible) {
  GeneratorConfig c = small(400, 4);
  c.loading_rate = 0.5;
  c.unplug_rate = 0.2;
  const GeneratedFleet f = generate_fleet(c);
  const FleetLabels labels = label_fleet(f.records, f.as_of);
  std::set<ExclusionRule> rules;
  for (const ExclusionEntry& e : labels.exclusions) rules.insert(e.rule);
  EXPECT_TRUE(rules.contains(ExclusionRule::LoadingDose));
  EXPECT_TRUE(rules.contains(ExclusionRule::Unplugged));
}

TEST(Generator, LabelsRecoverLatentStates) {
  const GeneratedFleet f = generate_fleet(small(200, 5).clean());
  const FleetLabels labels = label_fleet(f.records, f.as_of);
  std::map<std::string, const UnitHistory*> by_unit;
  for (const UnitHistory& u : labels.units) by_unit[u.profile.unit_id] = &u;
  std::size_t agree = 0, total = 0;
  for (const TruthRow& t : f.truth) {
    const UnitHistory* u = by_unit.at(t.unit_id);
    ASSERT_LT(t.occasion_index, u->history.occasions.size());
    const auto& label = u->history.occasions[t.occasion_index].label;
    ASSERT_TRUE(label);
    agree += to_int(*label) == t.latent_state;
    ++total;
  }
  EXPECT_EQ(total, 200u * 30u);
  EXPECT_GE(static_cast<double>(agree), 0.99 * static_cast<double>(total));
}

TEST(Generator, SameSeedSameBytes) {
  const FleetCsv a = to_csv(generate_fleet(small(150, 6)));
  const FleetCsv b = to_csv(generate_fleet(small(150, 6)));
  const FleetCsv other = to_csv(generate_fleet(small(150, 7)));
  EXPECT_EQ(a.units, b.units);
  EXPECT_EQ(a.schedule, b.schedule);
  EXPECT_EQ(a.drops, b.drops);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_NE(a.drops, other.drops);

  const auto dir = std::filesystem::temp_directory_path() / "adherence_synth_test";
  std::filesystem::remove_all(dir);
  const auto paths = write_fleet(generate_fleet(small(150, 6)), dir);
  ASSERT_EQ(paths.size(), 4u);
  std::ifstream in(paths[2]);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), a.drops);
  std::filesystem::remove_all(dir);
}

TEST(Generator, ValidationAndWindowWidths) {
  GeneratorConfig c;
  EXPECT_EQ(c.wma_hours(Frequency::daily()), 24.0);
  EXPECT_EQ(c.wma_hours(Frequency::weekly()), 144.0);
  c.wma_by_frequency = {{Frequency::weekly(), 48.0}};
  EXPECT_EQ(c.wma_hours(Frequency::weekly()), 48.0);
  c.validate();

  auto bad = [](auto edit) {
    GeneratorConfig g;
    edit(g);
    return code_of([&] { g.validate(); });
  };
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.n_units = 0; }), ErrorCode::InvalidConfig);
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.alpha = 0.0; }), ErrorCode::InvalidConfig);
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.stickiness = 1.5; }), ErrorCode::InvalidConfig);
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.fixed_baseline = -0.1; }), ErrorCode::InvalidConfig);
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.region_mix = {{Region::EU, 0.5}}; }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(bad([](GeneratorConfig& g) { g.wma_by_frequency = {{Frequency::daily(), 30.0}}; }),
            ErrorCode::InvalidConfig);
}

TEST(Bayes, PosteriorMatchesQuadrature) {
  GeneratorConfig c;
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    std::vector<int> states(1 + rng.index(8));
    for (int& s : states) s = rng.bernoulli(0.6);
    EXPECT_NEAR(bayes_posterior(c, states), quadrature_posterior(c, states), 1e-6);
  }
}

TEST(Bayes, DegenerateProcesses) {
  GeneratorConfig memoryless;
  memoryless.stickiness = 0.0;
  memoryless.fixed_baseline = 0.7;
  const BayesAuc flat = bayes_optimal_auc(memoryless, 100000, 6, 1);
  EXPECT_NEAR(flat.auc, 0.5, 2.0 * flat.standard_error + 1e-12);
  EXPECT_NEAR(bayes_optimal_auc_exact(memoryless, 6), 0.5, 1e-12);

  GeneratorConfig frozen;
  frozen.stickiness = 1.0;
  EXPECT_NEAR(bayes_optimal_auc(frozen, 100000, 6, 1).auc, 1.0, 1e-12);
  EXPECT_NEAR(bayes_optimal_auc_exact(frozen, 6), 1.0, 1e-12);
}

TEST(Bayes, PinnedReferenceValue) {
  GeneratorConfig c;
  ASSERT_EQ(c.stickiness, 0.85);
  ASSERT_EQ(c.alpha, 6.0);
  ASSERT_EQ(c.beta, 2.0);
  const double exact = bayes_optimal_auc_exact(c, 6);
  EXPECT_NEAR(exact, 0.936184, 5e-7);
  const BayesAuc mc = bayes_optimal_auc(c, 1000000, 6, 1);
  EXPECT_NEAR(mc.auc, 0.93595, 5e-6);
  EXPECT_NEAR(mc.standard_error, 0.0003, 0.0001);
  EXPECT_NEAR(mc.auc, exact, 3.0 * mc.standard_error);
}

TEST(Bayes, InputChecks) {
  GeneratorConfig c;
  EXPECT_EQ(code_of([&] { bayes_optimal_auc(c, 99999, 6, 1); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { bayes_optimal_auc_exact(c, 21); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { bayes_posterior(c, {}); }), ErrorCode::InvalidConfig);
}
