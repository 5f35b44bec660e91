#include <gtest/gtest.h>

#include "adherence/error.hpp"
#include "adherence/learners/model.hpp"
#include "adherence/learners/tree.hpp"
#include "adherence/rng.hpp"
#include "fixtures.hpp"

using namespace adherence;

namespace {

Dataset table(std::vector<std::vector<double>> xs, std::vector<int> ys) {
  Dataset d;
  d.n_features = xs.front().size();
  for (std::size_t j = 0; j < d.n_features; ++j) d.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < xs.size(); ++i) d.add_row(xs[i], ys[i]);
  return d;
}

double accuracy(const TrainedModel& m, const Dataset& d) {
  const auto p = predict_proba(m, d);
  double ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += predict_label(p[i]) == d.y[i];
  return ok / static_cast<double>(p.size());
}

const DecisionTree& only_tree(const TrainedModel& m) {
  return std::get<ForestModel>(m.body).trees.at(0);
}

TreeParams full_tree(std::uint64_t seed) {
  TreeParams p;
  p.max_depth = 12;
  p.min_samples_leaf = 1;
  p.max_features = -1;
  p.seed = seed;
  return p;
}

}  // namespace

TEST(Tree, PerfectSingleSplit) {
  const Dataset d = table({{0, 5}, {0, 3}, {1, 5}, {1, 3}}, {0, 0, 1, 1});
  const TrainedModel m = train_decision_tree(d, full_tree(1));
  EXPECT_EQ(only_tree(m).depth(), 1);
  EXPECT_EQ(only_tree(m).nodes[0].feature, 0);
  EXPECT_EQ(accuracy(m, d), 1.0);
}

TEST(Tree, PureLabelsGiveOneLeaf) {
  const Dataset d = table({{0, 1}, {1, 0}, {1, 1}}, {1, 1, 1});
  const TrainedModel m = train_decision_tree(d, full_tree(1));
  EXPECT_EQ(only_tree(m).nodes.size(), 1u);
  const std::vector<double> row{0.0, 0.0};
  EXPECT_EQ(predict_proba(m, row), 1.0);
}

TEST(Tree, PureLeavesPredictExactZeroOrOne) {
  const Dataset d = table({{0}, {1}, {2}, {3}}, {0, 0, 1, 1});
  const TrainedModel m = train_decision_tree(d, full_tree(1));
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = predict_proba(m, d.row(i));
    EXPECT_TRUE(p == 0.0 || p == 1.0);
  }
}

TEST(Tree, XorAtDepthTwo) {
  const Dataset d = table({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  TreeParams p = full_tree(1);
  p.max_depth = 2;
  const TrainedModel m = train_decision_tree(d, p);
  EXPECT_EQ(accuracy(m, d), 1.0);
  EXPECT_LE(only_tree(m).depth(), 2);
}

TEST(Tree, LeafProbabilitiesInRange) {
  const Dataset d = fixture::blobs(500, 3);
  TreeParams p = full_tree(2);
  p.min_samples_leaf = 10;
  const TrainedModel m = train_decision_tree(d, p);
  for (const TreeNode& n : only_tree(m).nodes) {
    if (n.is_leaf()) {
      EXPECT_GE(n.value, 0.0);
      EXPECT_LE(n.value, 1.0);
      EXPECT_GE(n.weight, 10.0);
    } else {
      EXPECT_GE(n.left, 0);
      EXPECT_GE(n.right, 0);
    }
  }
}

TEST(Tree, EmptyDataset) {
  Dataset d;
  d.n_features = 2;
  try {
    train_decision_tree(d, full_tree(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
  }
  try {
    train_model(d, ModelConfig::defaults(ModelKind::GradientBoosting));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
  }
}

TEST(Tree, WrongWidthIsSchemaMismatch) {
  const Dataset d = table({{0, 5}, {1, 3}}, {0, 1});
  const TrainedModel m = train_decision_tree(d, full_tree(1));
  const std::vector<double> row{1.0};
  try {
    predict_proba(m, row);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
  Dataset renamed = d;
  renamed.feature_names = {"a", "b"};
  EXPECT_THROW(predict_proba(m, renamed), Error);
}

TEST(Forest, SingleTreeReducesToDecisionTree) {
  const Dataset d = fixture::blobs(400, 5);
  const Dataset probe = fixture::blobs(300, 6);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ModelConfig rf = ModelConfig::defaults(ModelKind::RandomForest, seed);
    rf.n_trees = 1;
    rf.bootstrap = false;
    rf.max_features = -1;
    rf.min_samples_leaf = 1;
    const TrainedModel forest = train_random_forest(d, rf);
    const TrainedModel tree = train_decision_tree(d, full_tree(seed));
    EXPECT_EQ(predict_proba(forest, probe), predict_proba(tree, probe));
  }
}

TEST(Forest, ExtraTreesSingleTreeReducesToRandomThresholdTree) {
  const Dataset d = fixture::blobs(300, 7);
  const Dataset probe = fixture::blobs(200, 8);
  ModelConfig et = ModelConfig::defaults(ModelKind::ExtraTrees, 4);
  et.n_trees = 1;
  et.max_features = -1;
  et.min_samples_leaf = 1;
  TreeParams p = full_tree(4);
  p.threshold_mode = ThresholdMode::Random;
  EXPECT_EQ(predict_proba(train_extra_trees(d, et), probe),
            predict_proba(train_decision_tree(d, p), probe));
}

TEST(Forest, DeterministicForFixedSeed) {
  const Dataset d = fixture::blobs(300, 9);
  for (ModelKind kind : {ModelKind::RandomForest, ModelKind::ExtraTrees}) {
    ModelConfig c = ModelConfig::defaults(kind, 17);
    c.n_trees = 20;
    const auto a = predict_proba(train_model(d, c), d);
    const auto b = predict_proba(train_model(d, c), d);
    EXPECT_EQ(a, b);
    c.seed = 18;
    EXPECT_NE(a, predict_proba(train_model(d, c), d));
  }
}

TEST(Forest, ProbabilityIsMeanOfTrees) {
  const Dataset d = fixture::blobs(300, 10);
  ModelConfig c = ModelConfig::defaults(ModelKind::RandomForest, 1);
  c.n_trees = 15;
  const TrainedModel m = train_model(d, c);
  const auto& trees = std::get<ForestModel>(m.body).trees;
  ASSERT_EQ(trees.size(), 15u);
  for (std::size_t i = 0; i < 50; ++i) {
    double s = 0.0;
    for (const DecisionTree& t : trees) s += t.predict(d.row(i));
    EXPECT_DOUBLE_EQ(predict_proba(m, d.row(i)), s / 15.0);
  }
}

TEST(Forest, EnsembleAtLeastAsAccurateAsOneTree) {
  const Dataset train = fixture::blobs(1000, 11);
  const Dataset test = fixture::blobs(2000, 12);
  for (ModelKind kind : {ModelKind::RandomForest, ModelKind::ExtraTrees}) {
    ModelConfig c = ModelConfig::defaults(kind, 3);
    c.n_trees = 100;
    const double many = accuracy(train_model(train, c), test);
    c.n_trees = 1;
    const double one = accuracy(train_model(train, c), test);
    EXPECT_GE(many, one) << to_string(kind);
  }
}

TEST(Forest, LearnsMarkovSignal) {
  const Dataset d = fixture::markov_dataset(600, 3);
  ModelConfig c = ModelConfig::defaults(ModelKind::RandomForest, 1);
  c.n_trees = 30;
  const TrainedModel m = train_model(d, c);
  EXPECT_GT(accuracy(m, d), 0.85);
}

TEST(Bins, ExactForFewDistinctValues) {
  const Dataset d = table({{0.5, 3}, {0.25, 3}, {0.5, 3}, {2.0, 3}}, {0, 1, 0, 1});
  const BinnedFeatures b = BinnedFeatures::build(d);
  EXPECT_EQ(b.bins(0), 3u);
  EXPECT_EQ(b.bins(1), 1u);
  EXPECT_EQ(b.code(0, 1), 0);
  EXPECT_EQ(b.code(0, 0), 1);
  EXPECT_EQ(b.code(0, 3), 2);
}

TEST(Bins, CappedForManyValues) {
  const Dataset d = fixture::blobs(2000, 13);
  const BinnedFeatures b = BinnedFeatures::build(d, 64);
  for (std::size_t f = 0; f < d.n_features; ++f) {
    EXPECT_LE(b.bins(f), 64u);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      const auto c = b.code(f, i);
      EXPECT_GE(d.at(i, f), b.bin_lower[f][c]);
      EXPECT_LE(d.at(i, f), b.bin_upper[f][c]);
    }
  }
}

TEST(Features, ResolveMaxFeatures) {
  EXPECT_EQ(resolve_max_features(0, 17), 5u);
  EXPECT_EQ(resolve_max_features(0, 16), 4u);
  EXPECT_EQ(resolve_max_features(-1, 17), 17u);
  EXPECT_EQ(resolve_max_features(40, 17), 17u);
  EXPECT_EQ(resolve_max_features(3, 17), 3u);
}
