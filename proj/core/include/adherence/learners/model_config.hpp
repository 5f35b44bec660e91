#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adherence {

enum class ModelKind { ExtraTrees, RandomForest, RegularizedBoosting, GradientBoosting, Mlp, DecisionTree };

/// The five ensemble members, in voting order.
inline constexpr ModelKind kEnsembleKinds[5] = {ModelKind::ExtraTrees, ModelKind::RandomForest,
                                                ModelKind::RegularizedBoosting,
                                                ModelKind::GradientBoosting, ModelKind::Mlp};

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// `best` scans every boundary; `random` draws one uniform threshold per
/// candidate feature (extremely randomized trees).
enum class ThresholdMode { Best, Random };
enum class BoostLoss { Logistic, Squared };

/// Hyperparameters for every model kind. Fields not used by a kind are
/// ignored but still serialized.
struct ModelConfig {
  ModelKind kind = ModelKind::RandomForest;

  // tree ensembles and single trees
  int n_trees = 300;
  int max_depth = 12;
  int min_samples_leaf = 5;
  int max_features = 0;  // 0: ceil(sqrt(d)), -1: all features
  bool bootstrap = true;
  ThresholdMode threshold_mode = ThresholdMode::Best;

  // boosting
  int n_stages = 200;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double subsample = 1.0;
  BoostLoss loss = BoostLoss::Logistic;

  // multilayer perceptron
  std::vector<int> hidden{32, 16};
  int epochs = 30;
  int batch_size = 64;
  double step_size = 1e-3;

  std::uint64_t seed = 0;

  static ModelConfig defaults(ModelKind kind, std::uint64_t seed = 0);

  /// Throws InvalidHyperparameter on out-of-range values.
  void validate() const;

  /// Trees, stages or hidden units; smaller wins tuning ties.
  long complexity() const;

  /// Canonical `key=value;...` text of the fields relevant to `kind`.
  std::string describe() const;
};

/// Sets one hyperparameter from text, e.g. ("n_trees", "100") or
/// ("hidden", "32x16"). Throws InvalidHyperparameter for unknown names or
/// unparseable values.
void set_param(ModelConfig& config, std::string_view name, std::string_view value);

std::string format_hidden(const std::vector<int>& hidden);

}  // namespace adherence
