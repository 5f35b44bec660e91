#include "adherence/learners/model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "adherence/error.hpp"
#include "adherence/parallel.hpp"
#include "adherence/rng.hpp"

namespace adherence {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_rows(const Dataset& data, std::string_view what) {
  if (data.empty()) fail(ErrorCode::EmptyDataset, fmt::format("cannot train {} on zero rows", what));
}

TrainedModel make_model(const Dataset& data, const ModelConfig& config) {
  TrainedModel m;
  m.config = config;
  m.n_features = data.n_features;
  m.feature_names = data.feature_names;
  m.fingerprint = data.fingerprint();
  return m;
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

ForestModel fit_forest(const Dataset& data, const BinnedFeatures& bins, const ModelConfig& c) {
  const std::size_t n = data.n_rows();
  GrowParams gp;
  gp.criterion = SplitCriterion::Gini;
  gp.max_depth = c.max_depth;
  gp.min_samples_leaf = c.min_samples_leaf;
  gp.max_features = resolve_max_features(c.max_features, data.n_features);
  gp.threshold_mode = c.threshold_mode;

  RowTargets unit;
  if (!c.bootstrap) {
    unit.weight.assign(n, 1.0);
    unit.first.resize(n);
    for (std::size_t i = 0; i < n; ++i) unit.first[i] = data.y[i];
  }
  const std::vector<std::uint32_t> every_row = all_rows(n);

  ForestModel forest;
  forest.trees.resize(static_cast<std::size_t>(c.n_trees));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(c.seed, t));
    if (!c.bootstrap) {
      forest.trees[t] = grow_tree(bins, every_row, unit, gp, rng);
      return;
    }
    RowTargets boot;
    boot.weight.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) boot.weight[rng.index(n)] += 1.0;
    boot.first.resize(n);
    std::vector<std::uint32_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      boot.first[i] = boot.weight[i] * data.y[i];
      if (boot.weight[i] > 0.0) rows.push_back(static_cast<std::uint32_t>(i));
    }
    forest.trees[t] = grow_tree(bins, rows, boot, gp, rng);
  });
  return forest;
}

double base_rate(const Dataset& data) {
  return static_cast<double>(data.positives()) / static_cast<double>(data.n_rows());
}

double boosted_loss(BoostLoss loss, std::span<const double> margin, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double f = margin[i];
    if (loss == BoostLoss::Logistic) {
      // log(1 + e^f) - y f
      total += (f > 0.0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f))) - y[i] * f;
    } else {
      total += 0.5 * (y[i] - f) * (y[i] - f);
    }
  }
  return total / static_cast<double>(margin.size());
}

BoostedModel fit_boosting(const Dataset& data, const BinnedFeatures& bins, const ModelConfig& c,
                          bool second_order) {
  const std::size_t n = data.n_rows();
  BoostedModel model;
  model.loss = c.loss;
  model.learning_rate = c.learning_rate;
  const double p = base_rate(data);
  if (c.loss == BoostLoss::Logistic) {
    const double clipped = std::clamp(p, 1e-12, 1.0 - 1e-12);
    model.base_score = std::log(clipped / (1.0 - clipped));
  } else {
    model.base_score = p;
  }

  GrowParams gp;
  gp.criterion = second_order ? SplitCriterion::SecondOrder : SplitCriterion::SquaredError;
  gp.max_depth = c.max_depth;
  gp.min_samples_leaf = c.min_samples_leaf;
  gp.max_features = resolve_max_features(c.max_features, data.n_features);
  gp.lambda = second_order ? c.lambda : 0.0;
  gp.gamma = second_order ? c.gamma : 0.0;

  std::vector<double> margin(n, model.base_score);
  model.train_loss.push_back(boosted_loss(c.loss, margin, data.y));

  RowTargets targets;
  targets.weight.assign(n, 1.0);
  targets.first.resize(n);
  if (second_order) targets.second.resize(n);
  const std::vector<std::uint32_t> every_row = all_rows(n);
  const auto n_sub = static_cast<std::size_t>(
      std::max(1.0, std::round(c.subsample * static_cast<double>(n))));

  for (int stage = 0; stage < c.n_stages; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double y = data.y[i];
      if (c.loss == BoostLoss::Logistic) {
        const double prob = sigmoid(margin[i]);
        if (second_order) {
          targets.first[i] = prob - y;
          targets.second[i] = prob * (1.0 - prob);
        } else {
          targets.first[i] = y - prob;
        }
      } else if (second_order) {
        targets.first[i] = margin[i] - y;
        targets.second[i] = 1.0;
      } else {
        targets.first[i] = y - margin[i];
      }
    }
    Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(stage)));
    std::vector<std::uint32_t> rows;
    if (n_sub < n) {
      const std::vector<std::size_t> perm = rng.permutation(n);
      rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_sub));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = every_row;
    }
    DecisionTree tree = grow_tree(bins, rows, targets, gp, rng);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += c.learning_rate * tree.predict(data.row(i));
    }
    model.stages.push_back(std::move(tree));
    model.train_loss.push_back(boosted_loss(c.loss, margin, data.y));
  }
  return model;
}

void require_kind(const ModelConfig& config, std::initializer_list<ModelKind> kinds) {
  if (std::find(kinds.begin(), kinds.end(), config.kind) == kinds.end()) {
    fail(ErrorCode::InvalidHyperparameter,
         fmt::format("config kind '{}' does not match the trainer", to_string(config.kind)));
  }
}

}  // namespace

double BoostedModel::margin(std::span<const double> row) const {
  return margin(row, stages.size());
}

double BoostedModel::margin(std::span<const double> row, std::size_t n_stages) const {
  double f = base_score;
  const std::size_t upto = std::min(n_stages, stages.size());
  for (std::size_t s = 0; s < upto; ++s) f += learning_rate * stages[s].predict(row);
  return f;
}

TrainedModel train_decision_tree(const Dataset& data, const TreeParams& params) {
  require_rows(data, "a decision tree");
  ModelConfig c = ModelConfig::defaults(ModelKind::DecisionTree, params.seed);
  c.max_depth = params.max_depth;
  c.min_samples_leaf = params.min_samples_leaf;
  c.max_features = params.max_features;
  c.threshold_mode = params.threshold_mode;
  c.validate();
  TrainedModel m = make_model(data, c);
  m.body = fit_forest(data, BinnedFeatures::build(data), c);
  return m;
}

TrainedModel train_random_forest(const Dataset& data, const ModelConfig& config) {
  require_kind(config, {ModelKind::RandomForest, ModelKind::DecisionTree});
  return train_model(data, config);
}

TrainedModel train_extra_trees(const Dataset& data, const ModelConfig& config) {
  require_kind(config, {ModelKind::ExtraTrees});
  return train_model(data, config);
}

TrainedModel train_gradient_boosting(const Dataset& data, const ModelConfig& config) {
  require_kind(config, {ModelKind::GradientBoosting});
  return train_model(data, config);
}

TrainedModel train_regularized_boosting(const Dataset& data, const ModelConfig& config) {
  require_kind(config, {ModelKind::RegularizedBoosting});
  return train_model(data, config);
}

TrainedModel train_mlp(const Dataset& data, const ModelConfig& config) {
  require_kind(config, {ModelKind::Mlp});
  return train_model(data, config);
}

TrainedModel train_model(const Dataset& data, const ModelConfig& config) {
  require_rows(data, std::string(to_string(config.kind)));
  if (config.kind == ModelKind::Mlp) {
    config.validate();
    TrainedModel m = make_model(data, config);
    m.body = train_mlp_network(data, config);
    return m;
  }
  return train_model(data, BinnedFeatures::build(data), config);
}

TrainedModel train_model(const Dataset& data, const BinnedFeatures& bins,
                         const ModelConfig& config) {
  require_rows(data, std::string(to_string(config.kind)));
  config.validate();
  TrainedModel m = make_model(data, config);
  switch (config.kind) {
    case ModelKind::ExtraTrees:
    case ModelKind::RandomForest:
    case ModelKind::DecisionTree:
      m.body = fit_forest(data, bins, config);
      break;
    case ModelKind::GradientBoosting:
      m.body = fit_boosting(data, bins, config, false);
      break;
    case ModelKind::RegularizedBoosting:
      m.body = fit_boosting(data, bins, config, true);
      break;
    case ModelKind::Mlp:
      m.body = train_mlp_network(data, config);
      break;
  }
  return m;
}

double predict_proba(const TrainedModel& model, std::span<const double> row) {
  if (row.size() != model.n_features) {
    fail(ErrorCode::SchemaMismatch, fmt::format("row has {} features, model expects {}",
                                                row.size(), model.n_features));
  }
  return std::visit(
      [&](const auto& body) -> double {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, ForestModel>) {
          if (body.trees.empty()) fail(ErrorCode::UntrainedModel, "forest has no trees");
          double s = 0.0;
          for (const DecisionTree& t : body.trees) s += t.predict(row);
          return s / static_cast<double>(body.trees.size());
        } else if constexpr (std::is_same_v<T, BoostedModel>) {
          const double f = body.margin(row);
          return body.loss == BoostLoss::Logistic ? sigmoid(f) : std::clamp(f, 0.0, 1.0);
        } else {
          if (body.params().empty()) fail(ErrorCode::UntrainedModel, "network has no weights");
          return body.predict_proba(row);
        }
      },
      model.body);
}

std::vector<double> predict_proba(const TrainedModel& model, const Dataset& data) {
  if (data.fingerprint() != model.fingerprint) {
    fail(ErrorCode::SchemaMismatch,
         fmt::format("dataset schema {} does not match model schema {}", data.fingerprint(),
                     model.fingerprint));
  }
  std::vector<double> out(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) out[i] = predict_proba(model, data.row(i));
  return out;
}

std::vector<double> tree_feature_importance(const TrainedModel& model) {
  const std::vector<DecisionTree>* trees = nullptr;
  if (const auto* f = std::get_if<ForestModel>(&model.body)) trees = &f->trees;
  if (const auto* b = std::get_if<BoostedModel>(&model.body)) trees = &b->stages;
  if (!trees || trees->empty()) {
    fail(ErrorCode::UntrainedModel, "feature importance needs a fitted tree ensemble");
  }
  std::vector<double> total(model.n_features, 0.0);
  for (const DecisionTree& t : *trees) {
    const double sum = std::accumulate(t.importance.begin(), t.importance.end(), 0.0);
    if (sum <= 0.0) continue;
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += t.importance[j] / sum;
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : total) v /= sum;
  }
  return total;
}

Dataset undersample_majority(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.n_rows(); ++i) (data.y[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    fail(ErrorCode::SingleClass, "under-sampling needs both classes present");
  }
  std::vector<std::size_t>& majority = pos.size() >= neg.size() ? pos : neg;
  const std::vector<std::size_t>& minority = pos.size() >= neg.size() ? neg : pos;
  Rng rng(seed);
  rng.shuffle(majority);
  majority.resize(minority.size());
  std::vector<std::size_t> keep = minority;
  keep.insert(keep.end(), majority.begin(), majority.end());
  std::sort(keep.begin(), keep.end());
  return data.subset(keep);
}

double log_loss(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, "probabilities and labels differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], 1e-15, 1.0 - 1e-15);
    total -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return labels.empty() ? 0.0 : total / static_cast<double>(labels.size());
}

}  // namespace adherence
