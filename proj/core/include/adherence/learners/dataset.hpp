#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace adherence {

/// Dense row-major design matrix with binary targets (1 = OnTime).
struct Dataset {
  std::size_t n_features = 0;
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> feature_names;

  std::size_t n_rows() const { return y.size(); }
  bool empty() const { return y.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * n_features, n_features};
  }
  double at(std::size_t i, std::size_t j) const { return x[i * n_features + j]; }

  void add_row(std::span<const double> values, int label);

  Dataset subset(std::span<const std::size_t> rows) const;
  std::size_t positives() const;

  /// Stable hash of the feature names, used to reject mismatched inputs.
  std::string fingerprint() const;
};

std::string schema_fingerprint(const std::vector<std::string>& feature_names);

}  // namespace adherence
