#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fmt/format.h>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adherence/error.hpp"
#include "adherence/ingest.hpp"
#include "adherence/labeling.hpp"
#include "adherence/learners/dataset.hpp"
#include "adherence/learners/model_config.hpp"
#include "adherence/rows.hpp"

namespace adherence {

/// Column layout of the numeric design matrix: k history bits (latest
/// first) followed by one-hot frequency and one-hot region.
struct FeatureSchema {
  std::size_t k = kDefaultHistoryLength;
  Vocabulary frequency;
  Vocabulary region;

  /// Levels seen in `rows`: frequencies sorted by text, regions in
  /// continent order.
  static FeatureSchema fit(std::span<const FeatureRow> rows, std::size_t k);

  /// Inverse of feature_names(); throws SchemaMismatch on names it did not
  /// produce.
  static FeatureSchema from_names(const std::vector<std::string>& names);

  /// drop_lag1 (latest) .. drop_lag<k> (earliest), freq=<f>..., region=<r>...
  std::vector<std::string> feature_names() const;
  std::size_t n_features() const { return k + frequency.size() + region.size(); }

  /// Throws SchemaMismatch if the row's history length differs from k.
  std::vector<double> encode(const PredictionRow& row) const;
  Dataset encode(std::span<const FeatureRow> rows) const;
};

/// One row per occasion that has at least k labeled predecessors; the
/// history holds the k previous labels, latest first.
std::vector<FeatureRow> build_window_rows(const LabeledHistory& history,
                                          const UnitProfile& profile,
                                          const ScheduleSpec& schedule, std::size_t k);

namespace detail {

inline double entropy_bits(double pos, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {pos, total - pos}) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

}  // namespace detail

/// Information gain H(Y) - sum_v p(v) H(Y | X = v) in bits for a
/// categorical feature against binary labels. Throws LengthMismatch.
template <typename T>
double info_gain(std::span<const T> feature, std::span<const int> labels) {
  if (feature.size() != labels.size() || feature.empty()) {
    fail(ErrorCode::LengthMismatch,
         fmt::format("info_gain needs equal non-empty columns ({} vs {})", feature.size(),
                     labels.size()));
  }
  std::map<T, std::pair<double, double>> counts;  // value -> (positives, total)
  double pos = 0.0;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    auto& c = counts[feature[i]];
    c.second += 1.0;
    if (labels[i] == 1) {
      c.first += 1.0;
      pos += 1.0;
    }
  }
  const double n = static_cast<double>(labels.size());
  double conditional = 0.0;
  for (const auto& [value, c] : counts) {
    conditional += (c.second / n) * detail::entropy_bits(c.first, c.second);
  }
  const double gain = detail::entropy_bits(pos, n) - conditional;
  return gain > 0.0 ? gain : 0.0;
}

struct FeatureScore {
  std::string name;
  double info_gain_bits = 0.0;
  std::optional<double> normalized_importance;
};

/// Scores sorted by descending gain, ties broken by name.
struct FeatureRanking {
  std::vector<FeatureScore> scores;
};

/// Scores every column of `data` against its target.
FeatureRanking rank_features(const Dataset& data);

/// Fills normalized_importance by feature name.
void attach_importance(FeatureRanking& ranking, const std::vector<std::string>& names,
                       std::span<const double> importance);

struct SweepPoint {
  std::size_t k = 0;
  double roc_auc = 0.0;
};

/// Rebuilds feature rows for a given history length.
using RowBuilder = std::function<std::vector<FeatureRow>(std::size_t k)>;

struct SweepOptions {
  std::size_t k_min = 5;
  std::size_t k_max = 14;
  double train_ratio = 0.8;
  std::uint64_t split_seed = 0;
  ModelConfig learner = ModelConfig::defaults(ModelKind::RandomForest);
};

/// For each k: rebuild rows, split, train the learner, score held-out AUC.
std::vector<SweepPoint> sweep_window_size(const RowBuilder& builder, const SweepOptions& options);

}  // namespace adherence
