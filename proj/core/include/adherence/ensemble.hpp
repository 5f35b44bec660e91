#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adherence/domain.hpp"
#include "adherence/learners/dataset.hpp"
#include "adherence/learners/model.hpp"
#include "adherence/learners/tuning.hpp"
#include "adherence/metrics.hpp"

namespace adherence {

/// Five tuned members, one per kind in kEnsembleKinds order, sharing one
/// feature schema.
struct VotingEnsemble {
  std::array<TrainedModel, 5> members;
  std::string fingerprint;
};

/// OnTime iff at least three of the five votes are OnTime. Throws
/// WrongArity for any other vote count.
AdherenceLabel vote(std::span<const AdherenceLabel> votes);

/// Mean of the members' probabilities. Throws SchemaMismatch on a row of
/// the wrong width.
double score(const VotingEnsemble& ensemble, std::span<const double> row);

struct EnsemblePrediction {
  std::array<double, 5> member_proba{};
  AdherenceLabel label = AdherenceLabel::NotOnTime;
  double score = 0.0;
};

EnsemblePrediction predict(const VotingEnsemble& ensemble, std::span<const double> row);

/// Predictions for every row; throws SchemaMismatch when the dataset's
/// fingerprint differs from the ensemble's.
std::vector<EnsemblePrediction> predict(const VotingEnsemble& ensemble, const Dataset& data);

/// Assembles an ensemble from already trained members, checking kinds and
/// fingerprints.
VotingEnsemble make_ensemble(std::array<TrainedModel, 5> members);

/// Fits the five members directly from the given configs (defaults for
/// missing kinds) without any search.
VotingEnsemble fit_ensemble(const Dataset& train, const std::map<ModelKind, ModelConfig>& configs,
                            std::uint64_t seed);

struct EnsembleOptions {
  /// Starting configs and search spaces per kind; missing kinds use
  /// ModelConfig::defaults and a single-point space.
  std::map<ModelKind, ModelConfig> base;
  std::map<ModelKind, SearchSpace> spaces;
  TuneOptions tune;
  bool undersample = false;
  std::uint64_t seed = 0;
};

struct MemberReport {
  ModelKind kind = ModelKind::RandomForest;
  std::string chosen;  // describe() of the selected config
  double cv_auc = 0.0;
  std::optional<double> validation_auc;
};

struct ValidationReport {
  std::vector<MemberReport> members;
  MetricsBundle ensemble;  // vote labels, mean-probability scores
  ConfusionMatrix matrix;
};

struct TrainedEnsemble {
  VotingEnsemble ensemble;
  ValidationReport report;
};

/// Tunes each kind independently on `train` by k-fold search, refits the
/// winner on all of `train` and scores everything on `validation`.
/// Throws EmptyDataset when either split is empty.
TrainedEnsemble train_ensemble(const Dataset& train, const Dataset& validation,
                               const EnsembleOptions& options);

}  // namespace adherence
