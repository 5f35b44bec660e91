#include "adherence/learners/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adherence {
namespace {

struct Stat {
  double n = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  void add(const Stat& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
  }
  Stat minus(const Stat& o) const { return {n - o.n, s1 - o.s1, s2 - o.s2}; }
};

constexpr double kMinGain = 1e-12;

class Grower {
 public:
  Grower(const BinnedFeatures& bins, std::span<const std::uint32_t> rows,
         const RowTargets& targets, const GrowParams& params, Rng& rng)
      : bins_(bins), rows_(rows.begin(), rows.end()), scratch_(rows.size()),
        targets_(targets), params_(params), rng_(rng) {
    tree_.n_features = bins.n_features;
    tree_.importance.assign(bins.n_features, 0.0);
    max_features_ = params.max_features == 0 || params.max_features >= bins.n_features
                        ? bins.n_features
                        : params.max_features;
    std::size_t widest = 1;
    for (std::size_t f = 0; f < bins.n_features; ++f) widest = std::max(widest, bins.bins(f));
    hist_.resize(widest);
    features_.resize(bins.n_features);
  }

  DecisionTree run() {
    if (!rows_.empty()) build(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    double gain = -std::numeric_limits<double>::infinity();
    std::size_t feature = 0;
    std::size_t cut = 0;  // rows with code <= cut go left
  };

  double score(const Stat& s) const {
    if (s.n <= 0.0) return 0.0;
    switch (params_.criterion) {
      case SplitCriterion::Gini:
        return (s.s1 * s.s1 + (s.n - s.s1) * (s.n - s.s1)) / s.n;
      case SplitCriterion::SquaredError:
        return s.s1 * s.s1 / s.n;
      case SplitCriterion::SecondOrder: {
        const double denom = s.s2 + params_.lambda;
        return denom > 0.0 ? s.s1 * s.s1 / denom : 0.0;
      }
    }
    return 0.0;
  }

  double gain(const Stat& parent, const Stat& left, const Stat& right) const {
    const double raw = score(left) + score(right) - score(parent);
    if (params_.criterion == SplitCriterion::SecondOrder) return 0.5 * raw - params_.gamma;
    return raw;
  }

  double leaf_value(const Stat& s) const {
    switch (params_.criterion) {
      case SplitCriterion::Gini:
      case SplitCriterion::SquaredError:
        return s.n > 0.0 ? s.s1 / s.n : 0.0;
      case SplitCriterion::SecondOrder: {
        const double denom = s.s2 + params_.lambda;
        return denom > 0.0 ? -s.s1 / denom : 0.0;
      }
    }
    return 0.0;
  }

  Stat row_stat(std::uint32_t r) const {
    Stat s{targets_.weight[r], targets_.first[r], 0.0};
    if (!targets_.second.empty()) s.s2 = targets_.second[r];
    return s;
  }

  bool pure(const Stat& s) const {
    if (params_.criterion != SplitCriterion::Gini) return false;
    return s.s1 <= 0.0 || s.s1 >= s.n;
  }

  /// Evaluates one feature; returns false when the feature is constant in the node.
  bool evaluate(std::size_t f, std::size_t begin, std::size_t end, const Stat& parent,
                Split& best) {
    const std::size_t nb = bins_.bins(f);
    std::fill(hist_.begin(), hist_.begin() + static_cast<std::ptrdiff_t>(nb), Stat{});
    std::size_t lo = nb, hi = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = rows_[i];
      const std::uint16_t c = bins_.code(f, r);
      hist_[c].add(row_stat(r));
      lo = std::min<std::size_t>(lo, c);
      hi = std::max<std::size_t>(hi, c);
    }
    if (lo >= hi) return false;

    const double min_leaf = params_.min_samples_leaf;
    if (params_.threshold_mode == ThresholdMode::Random) {
      const double u = rng_.uniform(bins_.bin_lower[f][lo], bins_.bin_upper[f][hi]);
      std::size_t cut = lo;
      for (std::size_t b = lo; b < hi; ++b) {
        if (hist_[b].n > 0.0 && bins_.bin_upper[f][b] <= u) cut = b;
      }
      Stat left;
      for (std::size_t b = lo; b <= cut; ++b) left.add(hist_[b]);
      const Stat right = parent.minus(left);
      if (left.n >= min_leaf && right.n >= min_leaf) {
        const double g = gain(parent, left, right);
        if (g > best.gain) best = {g, f, cut};
      }
      return true;
    }

    Stat left;
    for (std::size_t b = lo; b < hi; ++b) {
      left.add(hist_[b]);
      if (hist_[b].n <= 0.0) continue;
      const Stat right = parent.minus(left);
      if (left.n < min_leaf) continue;
      if (right.n < min_leaf) break;
      const double g = gain(parent, left, right);
      if (g > best.gain) best = {g, f, b};
    }
    return true;
  }

  double threshold_for(std::size_t f, std::size_t cut, std::size_t begin, std::size_t end) const {
    // Midpoint between the cut bin and the next bin occupied in this node.
    std::size_t next = bins_.bins(f);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t c = bins_.code(f, rows_[i]);
      if (c > cut) next = std::min(next, c);
    }
    return 0.5 * (bins_.bin_upper[f][cut] + bins_.bin_lower[f][next]);
  }

  int make_leaf(const Stat& s) {
    TreeNode node;
    node.value = leaf_value(s);
    node.weight = s.n;
    if (params_.criterion == SplitCriterion::Gini) node.positives = s.s1;
    tree_.nodes.push_back(node);
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    Stat parent;
    for (std::size_t i = begin; i < end; ++i) parent.add(row_stat(rows_[i]));

    if (depth >= params_.max_depth || parent.n < 2.0 * params_.min_samples_leaf ||
        pure(parent)) {
      return make_leaf(parent);
    }

    Split best;
    const std::size_t d = bins_.n_features;
    if (max_features_ >= d) {
      for (std::size_t f = 0; f < d; ++f) evaluate(f, begin, end, parent, best);
    } else {
      // Sample without replacement until max_features non-constant features
      // have been examined.
      for (std::size_t f = 0; f < d; ++f) features_[f] = f;
      std::size_t examined = 0;
      for (std::size_t remaining = d; remaining > 0 && examined < max_features_; --remaining) {
        const std::size_t pick = rng_.index(remaining);
        const std::size_t f = features_[pick];
        std::swap(features_[pick], features_[remaining - 1]);
        if (evaluate(f, begin, end, parent, best)) ++examined;
      }
    }

    // Impure classifier nodes still take a zero-gain split (XOR needs one
    // at the root); boosting trees split only on strictly positive gain.
    const double floor = params_.criterion == SplitCriterion::Gini ? -kMinGain : kMinGain;
    if (!(best.gain > floor)) return make_leaf(parent);

    const double threshold = threshold_for(best.feature, best.cut, begin, end);
    // Stable partition through the scratch buffer.
    std::size_t n_left = 0, n_right = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (bins_.code(best.feature, rows_[i]) <= best.cut) rows_[begin + n_left++] = rows_[i];
      else scratch_[n_right++] = rows_[i];
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(n_right),
              rows_.begin() + static_cast<std::ptrdiff_t>(begin + n_left));

    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.importance[best.feature] += best.gain;
    const int left = build(begin, begin + n_left, depth + 1);
    const int right = build(begin + n_left, end, depth + 1);

    TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(best.feature);
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    node.value = leaf_value(parent);
    node.weight = parent.n;
    if (params_.criterion == SplitCriterion::Gini) node.positives = parent.s1;
    return index;
  }

  const BinnedFeatures& bins_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> scratch_;
  const RowTargets& targets_;
  const GrowParams& params_;
  Rng& rng_;
  DecisionTree tree_;
  std::size_t max_features_ = 0;
  std::vector<Stat> hist_;
  std::vector<std::size_t> features_;
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold
                                     ? n.left
                                     : n.right);
  }
  return nodes[i];
}

double DecisionTree::predict(std::span<const double> row) const { return leaf_for(row).value; }

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

BinnedFeatures BinnedFeatures::build(const Dataset& data, std::size_t max_bins) {
  max_bins = std::clamp<std::size_t>(max_bins, 2, 65535);
  BinnedFeatures b;
  b.n_rows = data.n_rows();
  b.n_features = data.n_features;
  b.codes.resize(b.n_rows * b.n_features);
  b.bin_lower.resize(b.n_features);
  b.bin_upper.resize(b.n_features);

  std::vector<double> values(b.n_rows);
  for (std::size_t f = 0; f < b.n_features; ++f) {
    for (std::size_t i = 0; i < b.n_rows; ++i) values[i] = data.at(i, f);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uppers = sorted;
    uppers.erase(std::unique(uppers.begin(), uppers.end()), uppers.end());
    if (uppers.size() > max_bins) {
      std::vector<double> q;
      for (std::size_t k = 1; k <= max_bins; ++k) {
        q.push_back(sorted[k * sorted.size() / max_bins - 1]);
      }
      q.erase(std::unique(q.begin(), q.end()), q.end());
      uppers = std::move(q);
    }
    if (uppers.empty()) uppers.push_back(0.0);
    std::vector<double> lowers(uppers.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < b.n_rows; ++i) {
      const auto it = std::lower_bound(uppers.begin(), uppers.end(), values[i]);
      const std::size_t code =
          std::min<std::size_t>(static_cast<std::size_t>(it - uppers.begin()), uppers.size() - 1);
      b.codes[f * b.n_rows + i] = static_cast<std::uint16_t>(code);
      lowers[code] = std::min(lowers[code], values[i]);
    }
    for (std::size_t k = 0; k < lowers.size(); ++k) {
      if (!std::isfinite(lowers[k])) lowers[k] = uppers[k];
    }
    b.bin_lower[f] = std::move(lowers);
    b.bin_upper[f] = std::move(uppers);
  }
  return b;
}

DecisionTree grow_tree(const BinnedFeatures& bins, std::span<const std::uint32_t> rows,
                       const RowTargets& targets, const GrowParams& params, Rng& rng) {
  return Grower(bins, rows, targets, params, rng).run();
}

std::size_t resolve_max_features(int configured, std::size_t n_features) {
  if (configured == -1) return n_features;
  if (configured == 0) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features)))));
  }
  return std::min<std::size_t>(static_cast<std::size_t>(configured), n_features);
}

}  // namespace adherence
