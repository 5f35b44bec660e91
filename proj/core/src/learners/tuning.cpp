#include "adherence/learners/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adherence/error.hpp"
#include "adherence/learners/model.hpp"
#include "adherence/metrics.hpp"
#include "adherence/parallel.hpp"
#include "adherence/rng.hpp"

namespace adherence {

std::size_t SearchSpace::size() const {
  std::size_t n = 1;
  for (const auto& [name, values] : params) n *= values.size();
  return n;
}

std::vector<ModelConfig> SearchSpace::expand(const ModelConfig& base) const {
  for (const auto& [name, values] : params) {
    if (values.empty()) {
      fail(ErrorCode::InvalidHyperparameter,
           fmt::format("search space for '{}' has no values", name));
    }
  }
  std::vector<ModelConfig> out{base};
  for (const auto& [name, values] : params) {
    std::vector<ModelConfig> next;
    next.reserve(out.size() * values.size());
    for (const ModelConfig& c : out) {
      for (const std::string& v : values) {
        ModelConfig copy = c;
        set_param(copy, name, v);
        next.push_back(std::move(copy));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds,
                                                    std::uint64_t seed) {
  if (folds < 2 || n < folds) {
    fail(ErrorCode::InsufficientData,
         fmt::format("{}-fold cross-validation needs at least {} rows, have {}", folds, folds, n));
  }
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * n / folds;
    const std::size_t hi = (f + 1) * n / folds;
    out[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                  perm.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return out;
}

namespace {

bool better(const TuneCandidate& a, const TuneCandidate& b) {
  if (a.mean_auc != b.mean_auc) return a.mean_auc > b.mean_auc;
  if (a.config.complexity() != b.config.complexity()) {
    return a.config.complexity() < b.config.complexity();
  }
  return a.config.describe() < b.config.describe();
}

}  // namespace

TuneResult tune(const Dataset& data, const ModelConfig& base, const SearchSpace& space,
                const TuneOptions& options) {
  std::vector<ModelConfig> grid = space.expand(base);
  for (const ModelConfig& c : grid) c.validate();
  if (options.mode == SearchMode::Random) {
    Rng rng(derive_seed(options.seed, 0x7a11));
    const std::vector<std::size_t> order = rng.permutation(grid.size());
    std::vector<ModelConfig> sampled;
    for (std::size_t i = 0; i < std::min(options.n_iter, grid.size()); ++i) {
      sampled.push_back(grid[order[i]]);
    }
    grid = std::move(sampled);
  }

  const auto folds = kfold_indices(data.n_rows(), options.folds, options.seed);
  std::vector<Dataset> fold_train(folds.size()), fold_valid(folds.size());
  std::vector<BinnedFeatures> fold_bins(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rest.begin(), rest.end());
    std::vector<std::size_t> held = folds[f];
    std::sort(held.begin(), held.end());
    fold_train[f] = data.subset(rest);
    fold_valid[f] = data.subset(held);
    fold_bins[f] = BinnedFeatures::build(fold_train[f]);
  }

  TuneResult result;
  for (const ModelConfig& config : grid) {
    std::vector<double> fold_auc(folds.size(), std::nan(""));
    parallel_for(folds.size(), [&](std::size_t f) {
      const Dataset& valid = fold_valid[f];
      const std::size_t pos = valid.positives();
      if (pos == 0 || pos == valid.n_rows() || fold_train[f].positives() == 0) return;
      const TrainedModel model = train_model(fold_train[f], fold_bins[f], config);
      fold_auc[f] = roc_auc(predict_proba(model, valid), valid.y);
    });
    TuneCandidate cand{config, 0.0, 0};
    for (double a : fold_auc) {
      if (std::isnan(a)) continue;
      cand.mean_auc += a;
      ++cand.folds_scored;
    }
    if (cand.folds_scored == 0) continue;
    cand.mean_auc /= static_cast<double>(cand.folds_scored);
    spdlog::debug("tune {}: mean AUC {:.4f} over {} folds", config.describe(), cand.mean_auc,
                  cand.folds_scored);
    result.candidates.push_back(std::move(cand));
  }
  if (result.candidates.empty()) {
    fail(ErrorCode::InsufficientData, "no cross-validation fold contained both classes");
  }
  const TuneCandidate* best = &result.candidates.front();
  for (const TuneCandidate& c : result.candidates) {
    if (better(c, *best)) best = &c;
  }
  result.best = best->config;
  result.best_score = best->mean_auc;
  return result;
}

}  // namespace adherence
