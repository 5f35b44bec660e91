#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "adherence/error.hpp"
#include "adherence/learners/model.hpp"
#include "adherence/learners/tuning.hpp"
#include "adherence/rng.hpp"

using namespace adherence;

namespace {

Dataset noisy(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.n_features = 6;
  for (int j = 0; j < 6; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(6);
    for (double& v : x) v = rng.normal();
    const double z = x[0] + 0.8 * x[1] - 0.6 * x[2] + 0.5 * x[0] * x[3];
    d.add_row(x, rng.bernoulli(1.0 / (1.0 + std::exp(-2.0 * z))) ? 1 : 0);
  }
  return d;
}

Dataset labeled(std::size_t pos, std::size_t neg) {
  Dataset d;
  d.n_features = 1;
  d.feature_names = {"id"};
  for (std::size_t i = 0; i < pos + neg; ++i) {
    d.add_row(std::vector<double>{static_cast<double>(i)}, i < pos ? 1 : 0);
  }
  return d;
}

TuneOptions opts(std::size_t folds, std::uint64_t seed = 1) {
  TuneOptions o;
  o.folds = folds;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Folds, PartitionWithBalancedSizes) {
  for (std::size_t n : {10u, 11u, 37u, 100u}) {
    const auto folds = kfold_indices(n, 10, 3);
    ASSERT_EQ(folds.size(), 10u);
    std::set<std::size_t> all;
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      all.insert(f.begin(), f.end());
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    EXPECT_EQ(all.size(), n);
    EXPECT_LE(hi - lo, 1u);
  }
  EXPECT_EQ(kfold_indices(50, 5, 3), kfold_indices(50, 5, 3));
}

TEST(Folds, TooFewRows) {
  try {
    kfold_indices(9, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(Space, ExpandLastVariesFastest) {
  SearchSpace s{{{"n_trees", {"10", "20"}}, {"max_depth", {"3", "5", "7"}}}};
  EXPECT_EQ(s.size(), 6u);
  const auto grid = s.expand(ModelConfig::defaults(ModelKind::RandomForest));
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[0].n_trees, 10);
  EXPECT_EQ(grid[0].max_depth, 3);
  EXPECT_EQ(grid[1].max_depth, 5);
  EXPECT_EQ(grid[3].n_trees, 20);
  EXPECT_EQ(SearchSpace{}.expand(ModelConfig::defaults(ModelKind::Mlp)).size(), 1u);
}

TEST(Space, BadValues) {
  SearchSpace empty{{{"n_trees", {}}}};
  EXPECT_THROW(empty.expand(ModelConfig::defaults(ModelKind::RandomForest)), Error);
  SearchSpace unknown{{{"n_leaves", {"4"}}}};
  try {
    unknown.expand(ModelConfig::defaults(ModelKind::RandomForest));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidHyperparameter);
  }
}

TEST(Tune, OnePointGrid) {
  const Dataset d = noisy(200, 1);
  ModelConfig base = ModelConfig::defaults(ModelKind::RandomForest, 4);
  base.n_trees = 7;
  const TuneResult r = tune(d, base, {}, opts(5));
  EXPECT_EQ(r.best.describe(), base.describe());
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].folds_scored, 5u);
  EXPECT_GT(r.best_score, 0.7);
}

TEST(Tune, MoreTreesWinOnNoisyData) {
  const Dataset d = noisy(600, 2);
  const SearchSpace s{{{"n_trees", {"1", "100"}}}};
  const TuneResult r = tune(d, ModelConfig::defaults(ModelKind::RandomForest, 5), s, opts(10));
  EXPECT_EQ(r.best.n_trees, 100);
  EXPECT_GT(r.candidates[1].mean_auc, r.candidates[0].mean_auc);
}

TEST(Tune, TiesGoToSmallerModel) {
  // one perfectly separating feature: every candidate scores 1.0
  Dataset d;
  d.n_features = 1;
  d.feature_names = {"x"};
  for (int i = 0; i < 100; ++i) d.add_row(std::vector<double>{static_cast<double>(i % 2)}, i % 2);
  const SearchSpace s{{{"n_trees", {"50", "10", "30"}}}};
  const TuneResult r = tune(d, ModelConfig::defaults(ModelKind::RandomForest, 1), s, opts(5));
  EXPECT_EQ(r.best.n_trees, 10);
  const SearchSpace depth{{{"max_depth", {"9", "4"}}}};
  const TuneResult r2 = tune(d, ModelConfig::defaults(ModelKind::RandomForest, 1), depth, opts(5));
  EXPECT_EQ(r2.best.max_depth, 4);  // same size: lexicographic description
}

TEST(Tune, RandomModeReproducible) {
  const Dataset d = noisy(200, 3);
  const SearchSpace s{{{"max_depth", {"2", "4", "8"}}, {"min_samples_leaf", {"1", "10"}}}};
  TuneOptions o = opts(4, 7);
  o.mode = SearchMode::Random;
  o.n_iter = s.size();
  ModelConfig base = ModelConfig::defaults(ModelKind::RandomForest, 2);
  base.n_trees = 10;
  const TuneResult a = tune(d, base, s, o);
  const TuneResult b = tune(d, base, s, o);
  EXPECT_EQ(a.best.describe(), b.best.describe());
  EXPECT_EQ(a.candidates.size(), s.size());
  o.n_iter = 2;
  EXPECT_EQ(tune(d, base, s, o).candidates.size(), 2u);
}

TEST(Tune, FoldsWithOneClassSkipped) {
  // 3 positives among 40 rows: some of 10 folds hold no positive
  Dataset d = labeled(3, 37);
  const TuneResult r = tune(d, ModelConfig::defaults(ModelKind::DecisionTree), {}, opts(10));
  EXPECT_LT(r.candidates[0].folds_scored, 10u);
  EXPECT_GT(r.candidates[0].folds_scored, 0u);
}

TEST(Tune, InsufficientData) {
  try {
    tune(labeled(2, 3), ModelConfig::defaults(ModelKind::RandomForest), {}, opts(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(Undersample, EightyTwenty) {
  const Dataset d = labeled(80, 20);
  const Dataset u = undersample_majority(d, 3);
  EXPECT_EQ(u.n_rows(), 40u);
  EXPECT_EQ(u.positives(), 20u);
  // the minority rows survive untouched
  std::set<double> ids;
  for (std::size_t i = 0; i < u.n_rows(); ++i) ids.insert(u.at(i, 0));
  for (int i = 80; i < 100; ++i) EXPECT_TRUE(ids.contains(i));
  const Dataset again = undersample_majority(d, 3);
  EXPECT_EQ(u.x, again.x);
  EXPECT_NE(u.x, undersample_majority(d, 4).x);
}

TEST(Undersample, BalancedUnchanged) {
  const Dataset d = labeled(50, 50);
  const Dataset u = undersample_majority(d, 1);
  EXPECT_EQ(u.n_rows(), 100u);
  std::multiset<double> a(d.x.begin(), d.x.end()), b(u.x.begin(), u.x.end());
  EXPECT_EQ(a, b);
}

TEST(Undersample, SingleClass) {
  try {
    undersample_majority(labeled(10, 0), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST(Config, ValidationAndText) {
  ModelConfig c = ModelConfig::defaults(ModelKind::GradientBoosting);
  EXPECT_EQ(c.max_depth, 3);
  EXPECT_NO_THROW(c.validate());
  set_param(c, "learning_rate", "0");
  EXPECT_THROW(c.validate(), Error);
  ModelConfig m = ModelConfig::defaults(ModelKind::Mlp);
  EXPECT_EQ(format_hidden(m.hidden), "32x16");
  set_param(m, "hidden", "8x4x2");
  EXPECT_EQ(m.hidden, (std::vector<int>{8, 4, 2}));
  set_param(m, "hidden", "none");
  EXPECT_TRUE(m.hidden.empty());
  EXPECT_THROW(set_param(m, "epochs", "ten"), Error);
  EXPECT_THROW(set_param(m, "hidden", "8x"), Error);
  for (ModelKind k : kEnsembleKinds) EXPECT_EQ(parse_model_kind(to_string(k)), k);
  EXPECT_NE(ModelConfig::defaults(ModelKind::RandomForest, 1).describe(),
            ModelConfig::defaults(ModelKind::RandomForest, 2).describe());
}
