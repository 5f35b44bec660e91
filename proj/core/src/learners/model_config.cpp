#include "adherence/learners/model_config.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "adherence/error.hpp"

namespace adherence {
namespace {

[[noreturn]] void bad_param(std::string_view name, std::string_view value) {
  fail(ErrorCode::InvalidHyperparameter,
       fmt::format("invalid value '{}' for hyperparameter '{}'", value, name));
}

int parse_int(std::string_view name, std::string_view value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_param(name, value);
  return v;
}

double parse_double(std::string_view name, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
    bad_param(name, value);
  }
  return v;
}

std::vector<int> parse_hidden(std::string_view value) {
  std::vector<int> out;
  if (value.empty() || value == "none") return out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t end = value.find('x', pos);
    if (end == std::string_view::npos) end = value.size();
    out.push_back(parse_int("hidden", value.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

void require(bool ok, std::string_view what) {
  if (!ok) fail(ErrorCode::InvalidHyperparameter, fmt::format("hyperparameter check failed: {}", what));
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::ExtraTrees: return "extra_trees";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::RegularizedBoosting: return "regularized_boosting";
    case ModelKind::GradientBoosting: return "gradient_boosting";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::DecisionTree: return "decision_tree";
  }
  return "random_forest";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::ExtraTrees, ModelKind::RandomForest,
                      ModelKind::RegularizedBoosting, ModelKind::GradientBoosting,
                      ModelKind::Mlp, ModelKind::DecisionTree}) {
    if (to_string(k) == text) return k;
  }
  fail(ErrorCode::InvalidHyperparameter, fmt::format("unknown model kind '{}'", text));
}

ModelConfig ModelConfig::defaults(ModelKind kind, std::uint64_t seed) {
  ModelConfig c;
  c.kind = kind;
  c.seed = seed;
  switch (kind) {
    case ModelKind::ExtraTrees:
      c.bootstrap = false;
      c.threshold_mode = ThresholdMode::Random;
      break;
    case ModelKind::RandomForest:
      break;
    case ModelKind::DecisionTree:
      c.n_trees = 1;
      c.bootstrap = false;
      c.max_features = -1;
      break;
    case ModelKind::RegularizedBoosting:
    case ModelKind::GradientBoosting:
      c.max_depth = 3;
      c.min_samples_leaf = 1;
      c.max_features = -1;
      break;
    case ModelKind::Mlp:
      break;
  }
  return c;
}

void ModelConfig::validate() const {
  require(max_depth >= 1, "max_depth >= 1");
  require(min_samples_leaf >= 1, "min_samples_leaf >= 1");
  require(max_features >= -1, "max_features >= -1");
  switch (kind) {
    case ModelKind::ExtraTrees:
    case ModelKind::RandomForest:
    case ModelKind::DecisionTree:
      require(n_trees >= 1, "n_trees >= 1");
      break;
    case ModelKind::RegularizedBoosting:
    case ModelKind::GradientBoosting:
      require(n_stages >= 0, "n_stages >= 0");
      require(learning_rate > 0.0, "learning_rate > 0");
      require(lambda >= 0.0, "lambda >= 0");
      require(gamma >= 0.0, "gamma >= 0");
      require(subsample > 0.0 && subsample <= 1.0, "0 < subsample <= 1");
      break;
    case ModelKind::Mlp:
      for (int h : hidden) require(h >= 1, "hidden layer sizes >= 1");
      require(epochs >= 1, "epochs >= 1");
      require(batch_size >= 1, "batch_size >= 1");
      require(step_size > 0.0, "step_size > 0");
      break;
  }
}

long ModelConfig::complexity() const {
  switch (kind) {
    case ModelKind::ExtraTrees:
    case ModelKind::RandomForest:
    case ModelKind::DecisionTree:
      return n_trees;
    case ModelKind::RegularizedBoosting:
    case ModelKind::GradientBoosting:
      return n_stages;
    case ModelKind::Mlp:
      return std::accumulate(hidden.begin(), hidden.end(), 0L);
  }
  return 0;
}

std::string format_hidden(const std::vector<int>& hidden) {
  if (hidden.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(hidden[i]);
  }
  return out;
}

std::string ModelConfig::describe() const {
  const std::string kind_text{to_string(kind)};
  switch (kind) {
    case ModelKind::ExtraTrees:
    case ModelKind::RandomForest:
    case ModelKind::DecisionTree:
      return fmt::format(
          "kind={};n_trees={};max_depth={};min_samples_leaf={};max_features={};bootstrap={};"
          "threshold_mode={};seed={}",
          kind_text, n_trees, max_depth, min_samples_leaf, max_features, bootstrap ? 1 : 0,
          threshold_mode == ThresholdMode::Best ? "best" : "random", seed);
    case ModelKind::RegularizedBoosting:
    case ModelKind::GradientBoosting:
      return fmt::format(
          "kind={};n_stages={};learning_rate={};max_depth={};min_samples_leaf={};lambda={};"
          "gamma={};subsample={};loss={};seed={}",
          kind_text, n_stages, learning_rate, max_depth, min_samples_leaf, lambda, gamma,
          subsample, loss == BoostLoss::Logistic ? "logistic" : "squared", seed);
    case ModelKind::Mlp:
      return fmt::format("kind={};hidden={};epochs={};batch_size={};step_size={};seed={}",
                         kind_text, format_hidden(hidden), epochs, batch_size, step_size, seed);
  }
  return kind_text;
}

void set_param(ModelConfig& c, std::string_view name, std::string_view value) {
  if (name == "n_trees") c.n_trees = parse_int(name, value);
  else if (name == "max_depth") c.max_depth = parse_int(name, value);
  else if (name == "min_samples_leaf") c.min_samples_leaf = parse_int(name, value);
  else if (name == "max_features") c.max_features = parse_int(name, value);
  else if (name == "bootstrap") c.bootstrap = parse_int(name, value) != 0;
  else if (name == "threshold_mode") {
    if (value == "best") c.threshold_mode = ThresholdMode::Best;
    else if (value == "random") c.threshold_mode = ThresholdMode::Random;
    else bad_param(name, value);
  } else if (name == "n_stages") c.n_stages = parse_int(name, value);
  else if (name == "learning_rate") c.learning_rate = parse_double(name, value);
  else if (name == "lambda") c.lambda = parse_double(name, value);
  else if (name == "gamma") c.gamma = parse_double(name, value);
  else if (name == "subsample") c.subsample = parse_double(name, value);
  else if (name == "loss") {
    if (value == "logistic") c.loss = BoostLoss::Logistic;
    else if (value == "squared") c.loss = BoostLoss::Squared;
    else bad_param(name, value);
  } else if (name == "hidden") c.hidden = parse_hidden(value);
  else if (name == "epochs") c.epochs = parse_int(name, value);
  else if (name == "batch_size") c.batch_size = parse_int(name, value);
  else if (name == "step_size") c.step_size = parse_double(name, value);
  else if (name == "seed") {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) bad_param(name, value);
    c.seed = v;
  }
  else fail(ErrorCode::InvalidHyperparameter, fmt::format("unknown hyperparameter '{}'", name));
}

}  // namespace adherence
