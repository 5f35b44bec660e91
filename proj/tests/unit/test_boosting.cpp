#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "adherence/learners/model.hpp"
#include "adherence/rng.hpp"
#include "fixtures.hpp"

using namespace adherence;

namespace {

ModelConfig boost(ModelKind kind, int stages) {
  ModelConfig c = ModelConfig::defaults(kind, 3);
  c.n_stages = stages;
  c.learning_rate = 0.1;
  return c;
}

const BoostedModel& body(const TrainedModel& m) { return std::get<BoostedModel>(m.body); }

}  // namespace

TEST(Boosting, ZeroStagesIsBaseRateLogOdds) {
  const Dataset d = fixture::boosting_200();
  const double p = static_cast<double>(d.positives()) / 200.0;
  for (ModelKind kind : {ModelKind::GradientBoosting, ModelKind::RegularizedBoosting}) {
    const TrainedModel m = train_model(d, boost(kind, 0));
    EXPECT_NEAR(body(m).base_score, std::log(p / (1 - p)), 1e-12);
    EXPECT_NEAR(predict_proba(m, d.row(0)), p, 1e-12);
    EXPECT_TRUE(body(m).stages.empty());
  }
}

TEST(Boosting, ConstantModelOnBalancedData) {
  Dataset d;
  d.n_features = 1;
  d.feature_names = {"x"};
  for (int i = 0; i < 50; ++i) d.add_row(std::vector<double>{static_cast<double>(i)}, i % 2);
  const TrainedModel m = train_model(d, boost(ModelKind::GradientBoosting, 0));
  EXPECT_NEAR(predict_proba(m, d.row(3)), 0.5, 1e-9);
}

TEST(Boosting, TrainingLossNonIncreasing) {
  const Dataset d = fixture::boosting_200();
  for (ModelKind kind : {ModelKind::GradientBoosting, ModelKind::RegularizedBoosting}) {
    const TrainedModel m = train_model(d, boost(kind, 200));
    const auto& loss = body(m).train_loss;
    ASSERT_EQ(loss.size(), 201u);
    for (std::size_t s = 1; s < loss.size(); ++s) {
      EXPECT_LE(loss[s], loss[s - 1] + 1e-12) << to_string(kind) << " stage " << s;
    }
    EXPECT_LT(loss.back(), loss.front());
    // recorded loss agrees with the loss of the model's own predictions
    std::vector<double> p = predict_proba(m, d);
    EXPECT_NEAR(log_loss(p, d.y), loss.back(), 1e-9);
  }
}

TEST(Boosting, SquaredStumpIsMeanResidualFit) {
  // 10 rows on one feature; oracle picks the cut minimizing the two-leaf SSE
  Dataset d;
  d.n_features = 1;
  d.feature_names = {"x"};
  const std::vector<int> y{0, 0, 1, 0, 1, 1, 1, 0, 1, 1};
  for (int i = 0; i < 10; ++i) d.add_row(std::vector<double>{static_cast<double>(i)}, y[static_cast<std::size_t>(i)]);

  double best_sse = std::numeric_limits<double>::infinity();
  double left_mean = 0, right_mean = 0;
  int best_cut = -1;
  for (int cut = 0; cut < 9; ++cut) {
    double sl = 0, sr = 0;
    for (int i = 0; i < 10; ++i) (i <= cut ? sl : sr) += y[static_cast<std::size_t>(i)];
    const double ml = sl / (cut + 1), mr = sr / (9 - cut);
    double sse = 0;
    for (int i = 0; i < 10; ++i) {
      const double m = i <= cut ? ml : mr;
      sse += (y[static_cast<std::size_t>(i)] - m) * (y[static_cast<std::size_t>(i)] - m);
    }
    if (sse < best_sse - 1e-12) {
      best_sse = sse;
      best_cut = cut;
      left_mean = ml;
      right_mean = mr;
    }
  }

  ModelConfig c = boost(ModelKind::GradientBoosting, 1);
  c.loss = BoostLoss::Squared;
  c.max_depth = 1;
  c.learning_rate = 1.0;
  const TrainedModel m = train_model(d, c);
  EXPECT_NEAR(body(m).base_score, 0.6, 1e-12);
  const DecisionTree& stump = body(m).stages.at(0);
  ASSERT_EQ(stump.nodes.size(), 3u);
  EXPECT_NEAR(stump.nodes[0].threshold, best_cut + 0.5, 1e-12);
  for (int i = 0; i < 10; ++i) {
    const double expect = i <= best_cut ? left_mean : right_mean;
    EXPECT_NEAR(body(m).margin(d.row(static_cast<std::size_t>(i))), expect, 1e-12);
  }
}

TEST(Boosting, HugeLambdaStaysAtBaseScore) {
  const Dataset d = fixture::boosting_200();
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {1.0, 1e2, 1e4, 1e8, 1e12}) {
    ModelConfig c = boost(ModelKind::RegularizedBoosting, 20);
    c.lambda = lambda;
    const TrainedModel m = train_model(d, c);
    double worst = 0.0;
    for (const DecisionTree& t : body(m).stages) {
      for (const TreeNode& n : t.nodes) {
        if (n.is_leaf()) worst = std::max(worst, std::abs(n.value));
      }
    }
    EXPECT_LE(worst, previous);
    previous = worst;
    if (lambda >= 1e12) {
      for (std::size_t i = 0; i < d.n_rows(); ++i) {
        EXPECT_NEAR(body(m).margin(d.row(i)), body(m).base_score, 1e-9);
      }
    }
  }
}

TEST(Boosting, LargeGammaGivesSingleLeafTrees) {
  const Dataset d = fixture::boosting_200();
  ModelConfig c = boost(ModelKind::RegularizedBoosting, 10);
  c.gamma = 1e6;
  const TrainedModel m = train_model(d, c);
  for (const DecisionTree& t : body(m).stages) EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(Boosting, SecondOrderWithoutPenaltyMatchesFirstOrderOnSquaredLoss) {
  Rng rng(4);
  Dataset d;
  d.n_features = 2;
  d.feature_names = {"u", "v"};
  for (int i = 0; i < 10; ++i) {
    d.add_row(std::vector<double>{rng.uniform(), static_cast<double>(rng.index(3))},
              rng.bernoulli(0.5) ? 1 : 0);
  }
  ModelConfig gb = boost(ModelKind::GradientBoosting, 5);
  gb.loss = BoostLoss::Squared;
  ModelConfig xgb = gb;
  xgb.kind = ModelKind::RegularizedBoosting;
  xgb.lambda = 0.0;
  xgb.gamma = 0.0;
  const TrainedModel a = train_model(d, gb);
  const TrainedModel b = train_model(d, xgb);
  ASSERT_EQ(body(a).stages.size(), body(b).stages.size());
  for (std::size_t s = 0; s < body(a).stages.size(); ++s) {
    const auto& na = body(a).stages[s].nodes;
    const auto& nb = body(b).stages[s].nodes;
    ASSERT_EQ(na.size(), nb.size());
    for (std::size_t k = 0; k < na.size(); ++k) {
      EXPECT_EQ(na[k].feature, nb[k].feature);
      if (na[k].is_leaf()) EXPECT_NEAR(na[k].value, nb[k].value, 1e-12);
    }
  }
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    EXPECT_NEAR(body(a).margin(d.row(i)), body(b).margin(d.row(i)), 1e-12);
  }
}

TEST(Boosting, DeterministicAndSubsampled) {
  const Dataset d = fixture::boosting_200();
  ModelConfig c = boost(ModelKind::RegularizedBoosting, 30);
  c.subsample = 0.5;
  const auto a = predict_proba(train_model(d, c), d);
  EXPECT_EQ(a, predict_proba(train_model(d, c), d));
  c.seed = 99;
  EXPECT_NE(a, predict_proba(train_model(d, c), d));
}

TEST(Boosting, PartialMarginUsesPrefix) {
  const Dataset d = fixture::boosting_200();
  const TrainedModel m = train_model(d, boost(ModelKind::GradientBoosting, 10));
  const BoostedModel& b = body(m);
  EXPECT_DOUBLE_EQ(b.margin(d.row(0), 0), b.base_score);
  EXPECT_DOUBLE_EQ(b.margin(d.row(0), 10), b.margin(d.row(0)));
  EXPECT_DOUBLE_EQ(b.margin(d.row(0), 3),
                   b.base_score + 0.1 * (b.stages[0].predict(d.row(0)) + b.stages[1].predict(d.row(0)) +
                                         b.stages[2].predict(d.row(0))));
}
