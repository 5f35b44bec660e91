#include "adherence/ensemble.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adherence/error.hpp"
#include "adherence/rng.hpp"

namespace adherence {

AdherenceLabel vote(std::span<const AdherenceLabel> votes) {
  if (votes.size() != 5) {
    fail(ErrorCode::WrongArity, fmt::format("majority vote needs 5 votes, got {}", votes.size()));
  }
  int on_time = 0;
  for (AdherenceLabel v : votes) on_time += to_int(v);
  return on_time >= 3 ? AdherenceLabel::OnTime : AdherenceLabel::NotOnTime;
}

EnsemblePrediction predict(const VotingEnsemble& ensemble, std::span<const double> row) {
  EnsemblePrediction p;
  std::array<AdherenceLabel, 5> votes{};
  double sum = 0.0;
  for (std::size_t m = 0; m < 5; ++m) {
    p.member_proba[m] = predict_proba(ensemble.members[m], row);
    votes[m] = label_from_int(predict_label(p.member_proba[m]));
    sum += p.member_proba[m];
  }
  p.label = vote(votes);
  p.score = sum / 5.0;
  return p;
}

double score(const VotingEnsemble& ensemble, std::span<const double> row) {
  return predict(ensemble, row).score;
}

std::vector<EnsemblePrediction> predict(const VotingEnsemble& ensemble, const Dataset& data) {
  if (data.fingerprint() != ensemble.fingerprint) {
    fail(ErrorCode::SchemaMismatch,
         fmt::format("feature schema {} does not match ensemble schema {}", data.fingerprint(),
                     ensemble.fingerprint));
  }
  std::vector<EnsemblePrediction> out;
  out.reserve(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) out.push_back(predict(ensemble, data.row(i)));
  return out;
}

VotingEnsemble make_ensemble(std::array<TrainedModel, 5> members) {
  VotingEnsemble e;
  e.fingerprint = members[0].fingerprint;
  for (std::size_t m = 0; m < 5; ++m) {
    if (members[m].kind() != kEnsembleKinds[m]) {
      fail(ErrorCode::ModelFormat, fmt::format("ensemble slot {} expects {}, got {}", m,
                                               to_string(kEnsembleKinds[m]),
                                               to_string(members[m].kind())));
    }
    if (members[m].fingerprint != e.fingerprint) {
      fail(ErrorCode::SchemaMismatch, "ensemble members were trained on different feature schemas");
    }
  }
  e.members = std::move(members);
  return e;
}

namespace {

ModelConfig member_base(const std::map<ModelKind, ModelConfig>& configs, std::size_t m,
                        std::uint64_t seed) {
  const ModelKind kind = kEnsembleKinds[m];
  const auto it = configs.find(kind);
  ModelConfig base = it != configs.end() ? it->second : ModelConfig::defaults(kind);
  base.kind = kind;
  base.seed = derive_seed(seed, m + 1);
  return base;
}

}  // namespace

VotingEnsemble fit_ensemble(const Dataset& train, const std::map<ModelKind, ModelConfig>& configs,
                            std::uint64_t seed) {
  std::array<TrainedModel, 5> members;
  for (std::size_t m = 0; m < 5; ++m) members[m] = train_model(train, member_base(configs, m, seed));
  return make_ensemble(std::move(members));
}

TrainedEnsemble train_ensemble(const Dataset& train, const Dataset& validation,
                               const EnsembleOptions& options) {
  if (train.empty()) fail(ErrorCode::EmptyDataset, "training split is empty");
  if (validation.empty()) fail(ErrorCode::EmptyDataset, "validation split is empty");
  if (train.fingerprint() != validation.fingerprint()) {
    fail(ErrorCode::SchemaMismatch, "training and validation splits have different schemas");
  }

  const Dataset fit_data =
      options.undersample ? undersample_majority(train, derive_seed(options.seed, 0x5a)) : train;

  std::array<TrainedModel, 5> members;
  ValidationReport report;
  const bool scorable = validation.positives() > 0 && validation.positives() < validation.n_rows();
  for (std::size_t m = 0; m < 5; ++m) {
    const ModelKind kind = kEnsembleKinds[m];
    const ModelConfig base = member_base(options.base, m, options.seed);
    const auto space_it = options.spaces.find(kind);
    const SearchSpace space = space_it != options.spaces.end() ? space_it->second : SearchSpace{};

    TuneOptions tune_options = options.tune;
    tune_options.seed = derive_seed(options.seed, 100 + m);
    const TuneResult tuned = tune(fit_data, base, space, tune_options);
    members[m] = train_model(fit_data, tuned.best);

    MemberReport r{kind, tuned.best.describe(), tuned.best_score, std::nullopt};
    if (scorable) r.validation_auc = roc_auc(predict_proba(members[m], validation), validation.y);
    spdlog::info("{}: cv auc {:.4f}, chose {}", to_string(kind), tuned.best_score, r.chosen);
    report.members.push_back(std::move(r));
  }

  TrainedEnsemble out{make_ensemble(std::move(members)), {}};
  const std::vector<EnsemblePrediction> preds = predict(out.ensemble, validation);
  std::vector<int> labels;
  std::vector<double> scores;
  for (const EnsemblePrediction& p : preds) {
    labels.push_back(to_int(p.label));
    scores.push_back(p.score);
  }
  report.matrix = confusion(validation.y, labels);
  report.ensemble = bundle(report.matrix, scores, validation.y);
  out.report = std::move(report);
  return out;
}

}  // namespace adherence
