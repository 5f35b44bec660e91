#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adherence/learners/dataset.hpp"
#include "adherence/learners/model_config.hpp"
#include "adherence/rng.hpp"

namespace adherence {

/// Leaf when `feature < 0`. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;   // leaf output: P(OnTime) for classifiers, additive score for boosting
  double weight = 0.0;  // (weighted) sample count that reached the node
  double positives = 0.0;  // classifier trees only: weighted OnTime count

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::size_t n_features = 0;
  std::vector<TreeNode> nodes;     // nodes[0] is the root
  std::vector<double> importance;  // summed split gain per feature (unnormalized)

  double predict(std::span<const double> row) const;
  const TreeNode& leaf_for(std::span<const double> row) const;
  int depth() const;
  std::size_t leaf_count() const;
};

/// Per-feature bin codes computed once per dataset and reused by every tree.
/// Features with at most `max_bins` distinct values are binned exactly.
struct BinnedFeatures {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<std::uint16_t> codes;             // feature-major: codes[f * n_rows + i]
  std::vector<std::vector<double>> bin_lower;   // smallest value in each bin
  std::vector<std::vector<double>> bin_upper;   // largest value in each bin

  static BinnedFeatures build(const Dataset& data, std::size_t max_bins = 256);

  std::uint16_t code(std::size_t feature, std::size_t row) const {
    return codes[feature * n_rows + row];
  }
  std::size_t bins(std::size_t feature) const { return bin_upper[feature].size(); }
};

enum class SplitCriterion {
  Gini,          // classification; targets are (weight, weight * y)
  SquaredError,  // regression on residuals; targets are (1, r)
  SecondOrder,   // boosting with (1, gradient, hessian) and L2 leaf penalty
};

/// Per-row sufficient statistics.
struct RowTargets {
  std::vector<double> weight;
  std::vector<double> first;
  std::vector<double> second;  // SecondOrder only
};

struct GrowParams {
  SplitCriterion criterion = SplitCriterion::Gini;
  int max_depth = 12;
  double min_samples_leaf = 1.0;
  std::size_t max_features = 0;  // features examined per split; 0 or >= d means all
  ThresholdMode threshold_mode = ThresholdMode::Best;
  double lambda = 0.0;  // SecondOrder only
  double gamma = 0.0;   // SecondOrder only
};

/// Grows one tree on `rows` (indices into `bins`). Deterministic given rng state.
DecisionTree grow_tree(const BinnedFeatures& bins, std::span<const std::uint32_t> rows,
                       const RowTargets& targets, const GrowParams& params, Rng& rng);

/// ceil(sqrt(d)) for 0, d for -1, otherwise min(value, d).
std::size_t resolve_max_features(int configured, std::size_t n_features);

}  // namespace adherence
