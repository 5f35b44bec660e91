#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "adherence/learners/dataset.hpp"
#include "adherence/learners/mlp.hpp"
#include "adherence/learners/model_config.hpp"
#include "adherence/learners/tree.hpp"

namespace adherence {

/// Bagged classifier trees; probability is the mean of leaf probabilities.
struct ForestModel {
  std::vector<DecisionTree> trees;
};

/// Additive model F(x) = base_score + learning_rate * sum(stage trees).
/// Logistic loss maps F through a sigmoid; squared loss clamps F to [0, 1].
struct BoostedModel {
  BoostLoss loss = BoostLoss::Logistic;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> stages;
  std::vector<double> train_loss;  // loss after 0, 1, ..., n stages

  double margin(std::span<const double> row) const;
  /// Margin using only the first `n_stages` trees.
  double margin(std::span<const double> row, std::size_t n_stages) const;
};

struct TrainedModel {
  ModelConfig config;
  std::size_t n_features = 0;
  std::string fingerprint;
  std::vector<std::string> feature_names;
  std::variant<ForestModel, BoostedModel, Mlp> body;

  ModelKind kind() const { return config.kind; }
};

/// Parameters for a single CART tree.
struct TreeParams {
  int max_depth = 12;
  int min_samples_leaf = 1;
  int max_features = -1;  // -1: all, 0: ceil(sqrt(d))
  ThresholdMode threshold_mode = ThresholdMode::Best;
  std::uint64_t seed = 0;
};

/// Each trainer throws EmptyDataset on zero rows and InvalidHyperparameter
/// on an invalid config.
TrainedModel train_decision_tree(const Dataset& data, const TreeParams& params);
TrainedModel train_random_forest(const Dataset& data, const ModelConfig& config);
TrainedModel train_extra_trees(const Dataset& data, const ModelConfig& config);
TrainedModel train_gradient_boosting(const Dataset& data, const ModelConfig& config);
TrainedModel train_regularized_boosting(const Dataset& data, const ModelConfig& config);
TrainedModel train_mlp(const Dataset& data, const ModelConfig& config);

/// Dispatches on config.kind.
TrainedModel train_model(const Dataset& data, const ModelConfig& config);

/// Same as train_model but reuses precomputed bins for tree-based kinds.
TrainedModel train_model(const Dataset& data, const BinnedFeatures& bins,
                         const ModelConfig& config);

/// P(OnTime). Throws SchemaMismatch when the row width differs from the
/// model's feature count.
double predict_proba(const TrainedModel& model, std::span<const double> row);

/// Scores every row; throws SchemaMismatch when the dataset's feature
/// schema fingerprint differs from the model's.
std::vector<double> predict_proba(const TrainedModel& model, const Dataset& data);

inline int predict_label(double probability) { return probability >= 0.5 ? 1 : 0; }

/// Per-feature importance of a tree ensemble: each tree's impurity decrease
/// normalized to sum 1, averaged across trees and renormalized.
/// Throws UntrainedModel for non-tree models or empty forests.
std::vector<double> tree_feature_importance(const TrainedModel& model);

/// Randomly reduces the majority class to the minority count. Throws
/// SingleClass when only one class is present.
Dataset undersample_majority(const Dataset& data, std::uint64_t seed);

/// Binary log-loss of probabilities against labels (probabilities clipped
/// to [1e-15, 1 - 1e-15]).
double log_loss(std::span<const double> probabilities, std::span<const int> labels);

}  // namespace adherence
