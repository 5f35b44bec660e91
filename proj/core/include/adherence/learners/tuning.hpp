#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adherence/learners/dataset.hpp"
#include "adherence/learners/model_config.hpp"

namespace adherence {

/// Named hyperparameters with candidate values, in text form accepted by
/// set_param. An empty space is the single point `base`.
struct SearchSpace {
  std::vector<std::pair<std::string, std::vector<std::string>>> params;

  std::size_t size() const;
  /// Cartesian product in declaration order, last parameter varying fastest.
  std::vector<ModelConfig> expand(const ModelConfig& base) const;
};

enum class SearchMode { Grid, Random };

struct TuneOptions {
  SearchMode mode = SearchMode::Grid;
  std::size_t n_iter = 10;  // Random mode: points sampled without replacement
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

struct TuneCandidate {
  ModelConfig config;
  double mean_auc = 0.0;
  std::size_t folds_scored = 0;
};

struct TuneResult {
  ModelConfig best;
  double best_score = 0.0;
  std::vector<TuneCandidate> candidates;
};

/// Contiguous blocks of one seeded permutation; fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds,
                                                    std::uint64_t seed);

/// Picks the config with the highest mean fold ROC AUC; ties go to the
/// smaller model, then to the lexicographically smaller description.
/// Folds holding a single class are skipped. Throws InsufficientData when
/// the dataset has fewer rows than folds or no fold can be scored.
TuneResult tune(const Dataset& data, const ModelConfig& base, const SearchSpace& space,
                const TuneOptions& options);

}  // namespace adherence
