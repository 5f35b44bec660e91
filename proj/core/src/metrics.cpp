#include "adherence/metrics.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "adherence/error.hpp"
#include "adherence/rng.hpp"

namespace adherence {
namespace {

std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) fail(ErrorCode::LengthMismatch, fmt::format("length mismatch: {} vs {}", a, b));
  if (a == 0) fail(ErrorCode::LengthMismatch, "inputs are empty");
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const int> truth) {
  const auto pos = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  return {pos, truth.size() - pos};
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  check_lengths(truth.size(), predicted.size());
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1;
    const bool p = predicted[i] == 1;
    if (t && p) ++m.tp;
    else if (t) ++m.fn;
    else if (p) ++m.fp;
    else ++m.tn;
  }
  return m;
}

MetricsBundle rates(const ConfusionMatrix& m) {
  const auto tp = static_cast<double>(m.tp);
  const auto fn = static_cast<double>(m.fn);
  const auto fp = static_cast<double>(m.fp);
  const auto tn = static_cast<double>(m.tn);
  MetricsBundle b;
  b.accuracy = ratio(tp + tn, static_cast<double>(m.total()));
  b.precision = ratio(tp, tp + fp);
  b.recall = ratio(tp, tp + fn);
  b.specificity = ratio(tn, tn + fp);
  if (b.precision && b.recall) b.f1 = ratio(2.0 * *b.precision * *b.recall, *b.precision + *b.recall);
  return b;
}

MetricsBundle bundle(const ConfusionMatrix& m, std::span<const double> scores,
                     std::span<const int> truth) {
  MetricsBundle b = rates(m);
  if (!scores.empty() && scores.size() == truth.size()) {
    const auto [pos, neg] = class_counts(truth);
    if (pos > 0 && neg > 0) b.roc_auc = roc_auc(scores, truth);
  }
  return b;
}

double roc_auc(std::span<const double> scores, std::span<const int> truth) {
  check_lengths(scores.size(), truth.size());
  const auto [n_pos, n_neg] = class_counts(truth);
  if (n_pos == 0 || n_neg == 0) {
    fail(ErrorCode::SingleClass, "ROC AUC needs both classes present");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a tie group spanning positions [i, j) gets (i + j + 1) / 2.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const auto np = static_cast<double>(n_pos);
  const auto nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> truth) {
  check_lengths(scores.size(), truth.size());
  const auto [n_pos, n_neg] = class_counts(truth);
  if (n_pos == 0 || n_neg == 0) {
    fail(ErrorCode::SingleClass, "ROC curve needs both classes present");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (truth[order[i]] == 1) ++tp;
      else ++fp;
      ++i;
    }
    curve.push_back({s, static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  return curve;
}

double curve_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  }
  return area;
}

LearningCurve learning_curves(const Dataset& train, const Dataset& test,
                              std::span<const std::size_t> sizes, std::uint64_t seed,
                              const FitPredict& fit_predict) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] > train.n_rows()) {
      fail(ErrorCode::SizeTooLarge, fmt::format("learning-curve size {} exceeds {} training rows",
                                                sizes[i], train.n_rows()));
    }
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      fail(ErrorCode::SizeTooLarge, "learning-curve sizes must be positive and strictly increasing");
    }
  }
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(train.n_rows());

  auto point = [](std::size_t size, std::string split, std::span<const int> truth,
                  std::span<const int> predicted) {
    const MetricsBundle b = rates(confusion(truth, predicted));
    return LearningCurvePoint{size, std::move(split), b.accuracy, b.precision, b.f1};
  };

  LearningCurve curve;
  for (std::size_t size : sizes) {
    const Dataset subset =
        train.subset(std::span<const std::size_t>(perm.data(), size));
    const auto [train_pred, test_pred] = fit_predict(subset, test);
    curve.points.push_back(point(size, "train", subset.y, train_pred));
    curve.points.push_back(point(size, "test", test.y, test_pred));
  }
  return curve;
}

CurveOffsets offsets_at_max(const LearningCurve& curve) {
  CurveOffsets out;
  if (curve.points.size() < 2) return out;
  const LearningCurvePoint& tr = curve.points[curve.points.size() - 2];
  const LearningCurvePoint& te = curve.points.back();
  auto diff = [](const std::optional<double>& a, const std::optional<double>& b) {
    return a && b ? std::optional<double>(*a - *b) : std::nullopt;
  };
  out.accuracy = diff(tr.accuracy, te.accuracy);
  out.precision = diff(tr.precision, te.precision);
  out.f1 = diff(tr.f1, te.f1);
  return out;
}

}  // namespace adherence
