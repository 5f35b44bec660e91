#include "adherence/model_io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "adherence/error.hpp"

namespace adherence {
namespace {

using nlohmann::json;

json tree_to_json(const DecisionTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array(), weight = json::array(),
       positives = json::array();
  for (const TreeNode& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    weight.push_back(n.weight);
    positives.push_back(n.positives);
  }
  return {{"n_features", tree.n_features}, {"feature", feature},     {"threshold", threshold},
          {"left", left},                  {"right", right},         {"value", value},
          {"weight", weight},              {"positives", positives}, {"importance", tree.importance}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  tree.n_features = j.at("n_features").get<std::size_t>();
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto weight = j.at("weight").get<std::vector<double>>();
  const auto positives = j.at("positives").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n || weight.size() != n || positives.size() != n) {
    fail(ErrorCode::ModelFormat, "tree node arrays are empty or of unequal length");
  }
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = tree.nodes[i];
    node = {feature[i], threshold[i], left[i], right[i], value[i], weight[i], positives[i]};
    if (node.is_leaf()) continue;
    const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
    if (node.feature >= static_cast<int>(tree.n_features) || !in_range(node.left) ||
        !in_range(node.right)) {
      fail(ErrorCode::ModelFormat, fmt::format("tree node {} has invalid links", i));
    }
  }
  tree.importance = j.at("importance").get<std::vector<double>>();
  if (tree.importance.size() != tree.n_features) {
    fail(ErrorCode::ModelFormat, "tree importance length differs from feature count");
  }
  return tree;
}

json config_to_json(const ModelConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"n_trees", c.n_trees},
          {"max_depth", c.max_depth},
          {"min_samples_leaf", c.min_samples_leaf},
          {"max_features", c.max_features},
          {"bootstrap", c.bootstrap},
          {"threshold_mode", c.threshold_mode == ThresholdMode::Best ? "best" : "random"},
          {"n_stages", c.n_stages},
          {"learning_rate", c.learning_rate},
          {"lambda", c.lambda},
          {"gamma", c.gamma},
          {"subsample", c.subsample},
          {"loss", c.loss == BoostLoss::Logistic ? "logistic" : "squared"},
          {"hidden", c.hidden},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"step_size", c.step_size},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.kind = parse_model_kind(j.at("kind").get<std::string>());
  c.n_trees = j.at("n_trees").get<int>();
  c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  c.max_features = j.at("max_features").get<int>();
  c.bootstrap = j.at("bootstrap").get<bool>();
  const auto mode = j.at("threshold_mode").get<std::string>();
  if (mode != "best" && mode != "random") fail(ErrorCode::ModelFormat, "unknown threshold_mode " + mode);
  c.threshold_mode = mode == "best" ? ThresholdMode::Best : ThresholdMode::Random;
  c.n_stages = j.at("n_stages").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.subsample = j.at("subsample").get<double>();
  const auto loss = j.at("loss").get<std::string>();
  if (loss != "logistic" && loss != "squared") fail(ErrorCode::ModelFormat, "unknown loss " + loss);
  c.loss = loss == "logistic" ? BoostLoss::Logistic : BoostLoss::Squared;
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.step_size = j.at("step_size").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json model_json(const TrainedModel& m) {
  json j = {{"format", "adherence-model"},
            {"version", kModelFormatVersion},
            {"config", config_to_json(m.config)},
            {"n_features", m.n_features},
            {"fingerprint", m.fingerprint},
            {"feature_names", m.feature_names}};
  if (const auto* forest = std::get_if<ForestModel>(&m.body)) {
    json trees = json::array();
    for (const DecisionTree& t : forest->trees) trees.push_back(tree_to_json(t));
    j["forest"] = {{"trees", trees}};
  } else if (const auto* boosted = std::get_if<BoostedModel>(&m.body)) {
    json stages = json::array();
    for (const DecisionTree& t : boosted->stages) stages.push_back(tree_to_json(t));
    j["boosted"] = {{"loss", boosted->loss == BoostLoss::Logistic ? "logistic" : "squared"},
                    {"base_score", boosted->base_score},
                    {"learning_rate", boosted->learning_rate},
                    {"train_loss", boosted->train_loss},
                    {"stages", stages}};
  } else {
    const Mlp& net = std::get<Mlp>(m.body);
    j["mlp"] = {{"layer_sizes", net.layer_sizes()}, {"params", net.params()}};
  }
  return j;
}

void check_header(const json& j, std::string_view format) {
  if (!j.is_object() || j.value("format", "") != format) {
    fail(ErrorCode::ModelFormat, fmt::format("not an {} file", format));
  }
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion) {
    fail(ErrorCode::ModelFormat,
         fmt::format("unsupported {} version {} (expected {})", format, version, kModelFormatVersion));
  }
}

TrainedModel model_from(const json& j) {
  check_header(j, "adherence-model");
  TrainedModel m;
  m.config = config_from_json(j.at("config"));
  m.n_features = j.at("n_features").get<std::size_t>();
  m.fingerprint = j.at("fingerprint").get<std::string>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (m.feature_names.size() != m.n_features || schema_fingerprint(m.feature_names) != m.fingerprint) {
    fail(ErrorCode::ModelFormat, "feature names do not match the stored schema fingerprint");
  }
  const auto check_width = [&](const DecisionTree& t) {
    if (t.n_features != m.n_features) fail(ErrorCode::ModelFormat, "tree width differs from model");
  };
  if (j.contains("forest")) {
    ForestModel forest;
    for (const json& t : j.at("forest").at("trees")) forest.trees.push_back(tree_from_json(t));
    if (forest.trees.empty()) fail(ErrorCode::ModelFormat, "forest has no trees");
    for (const DecisionTree& t : forest.trees) check_width(t);
    m.body = std::move(forest);
  } else if (j.contains("boosted")) {
    const json& b = j.at("boosted");
    BoostedModel boosted;
    boosted.loss = b.at("loss").get<std::string>() == "squared" ? BoostLoss::Squared : BoostLoss::Logistic;
    boosted.base_score = b.at("base_score").get<double>();
    boosted.learning_rate = b.at("learning_rate").get<double>();
    boosted.train_loss = b.at("train_loss").get<std::vector<double>>();
    for (const json& t : b.at("stages")) boosted.stages.push_back(tree_from_json(t));
    for (const DecisionTree& t : boosted.stages) check_width(t);
    m.body = std::move(boosted);
  } else if (j.contains("mlp")) {
    const json& n = j.at("mlp");
    const auto sizes = n.at("layer_sizes").get<std::vector<int>>();
    if (sizes.size() < 2 || sizes.front() != static_cast<int>(m.n_features) || sizes.back() != 1) {
      fail(ErrorCode::ModelFormat, "network layer sizes do not fit the model");
    }
    Mlp net(sizes);
    auto params = n.at("params").get<std::vector<double>>();
    if (params.size() != net.params().size()) {
      fail(ErrorCode::ModelFormat, fmt::format("network expects {} parameters, file has {}",
                                               net.params().size(), params.size()));
    }
    net.params() = std::move(params);
    m.body = std::move(net);
  } else {
    fail(ErrorCode::ModelFormat, "model file has no fitted body");
  }
  return m;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::ModelFormat, fmt::format("malformed model file: {}", e.what()));
  }
}

}  // namespace

std::string model_to_json(const TrainedModel& model) { return model_json(model).dump(); }

std::string ensemble_to_json(const VotingEnsemble& ensemble) {
  json members = json::array();
  for (const TrainedModel& m : ensemble.members) members.push_back(model_json(m));
  const json j = {{"format", "adherence-ensemble"},
                  {"version", kModelFormatVersion},
                  {"fingerprint", ensemble.fingerprint},
                  {"members", members}};
  return j.dump();
}

TrainedModel model_from_json(std::string_view text) {
  return guarded([&] { return model_from(json::parse(text)); });
}

VotingEnsemble ensemble_from_json(std::string_view text) {
  return guarded([&] {
    const json j = json::parse(text);
    check_header(j, "adherence-ensemble");
    const json& members = j.at("members");
    if (!members.is_array() || members.size() != 5) {
      fail(ErrorCode::ModelFormat, "ensemble file must hold exactly 5 members");
    }
    std::array<TrainedModel, 5> ms;
    for (std::size_t i = 0; i < 5; ++i) ms[i] = model_from(members[i]);
    VotingEnsemble e = make_ensemble(std::move(ms));
    if (e.fingerprint != j.at("fingerprint").get<std::string>()) {
      fail(ErrorCode::ModelFormat, "ensemble fingerprint differs from its members");
    }
    return e;
  });
}

void save_ensemble(const VotingEnsemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  out << ensemble_to_json(ensemble) << '\n';
  if (!out) fail(ErrorCode::Io, fmt::format("failed writing {}", path.string()));
}

VotingEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::UnreadableFile, fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return ensemble_from_json(buf.str());
}

}  // namespace adherence
