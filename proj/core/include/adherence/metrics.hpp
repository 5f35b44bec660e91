#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adherence/learners/dataset.hpp"

namespace adherence {

/// Positive class is OnTime (label 1).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch for unequal or empty inputs.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

/// Rates with a zero denominator are absent rather than 0.
struct MetricsBundle {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;  // sensitivity
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> roc_auc;
};

/// Ratios from the matrix alone; roc_auc left absent.
MetricsBundle rates(const ConfusionMatrix& m);

/// Ratios plus ROC AUC of `scores` against `truth` (absent when only one
/// class is present).
MetricsBundle bundle(const ConfusionMatrix& m, std::span<const double> scores,
                     std::span<const int> truth);

/// Rank-statistic AUC with average ranks for tied scores. Throws
/// SingleClass unless both labels occur, LengthMismatch on unequal lengths.
double roc_auc(std::span<const double> scores, std::span<const int> truth);

struct RocPoint {
  double threshold;  // score >= threshold is predicted positive; +inf for the origin
  double fpr;
  double tpr;
};

/// One point per distinct score, descending, preceded by (0, 0).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> truth);

/// Trapezoidal area under a curve from roc_curve.
double curve_area(std::span<const RocPoint> curve);

struct LearningCurvePoint {
  std::size_t size = 0;
  std::string split;  // "train" or "test"
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> f1;
};

struct LearningCurve {
  std::vector<LearningCurvePoint> points;  // train then test for each size
};

/// Fits on a training subset and returns predicted labels for that subset
/// and for the test set, in row order.
using FitPredict = std::function<std::pair<std::vector<int>, std::vector<int>>(
    const Dataset& train_subset, const Dataset& test)>;

/// Trains on nested prefixes of one seeded permutation of `train`. Sizes
/// must be strictly increasing; throws SizeTooLarge if one exceeds |train|.
LearningCurve learning_curves(const Dataset& train, const Dataset& test,
                              std::span<const std::size_t> sizes, std::uint64_t seed,
                              const FitPredict& fit_predict);

/// Train-minus-test gap of each metric at the largest size.
struct CurveOffsets {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> f1;
};

CurveOffsets offsets_at_max(const LearningCurve& curve);

}  // namespace adherence
