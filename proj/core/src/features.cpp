#include "adherence/features.hpp"

#include <algorithm>
#include <set>
#include <spdlog/spdlog.h>

#include "adherence/learners/model.hpp"
#include "adherence/metrics.hpp"

namespace adherence {

FeatureSchema FeatureSchema::fit(std::span<const FeatureRow> rows, std::size_t k) {
  FeatureSchema s;
  s.k = k;
  std::set<std::string> freqs;
  std::set<std::string> regions;
  for (const FeatureRow& r : rows) {
    freqs.insert(r.frequency);
    regions.insert(r.region);
  }
  s.frequency.levels.assign(freqs.begin(), freqs.end());
  for (Region r : kAllRegions) {
    const std::string code{to_string(r)};
    if (regions.contains(code)) s.region.levels.push_back(code);
  }
  // Unknown region codes never reach here: profiles are validated upstream.
  return s;
}

FeatureSchema FeatureSchema::from_names(const std::vector<std::string>& names) {
  FeatureSchema s;
  s.k = 0;
  for (const std::string& n : names) {
    if (n.starts_with("freq=")) {
      s.frequency.levels.push_back(n.substr(5));
    } else if (n.starts_with("region=")) {
      s.region.levels.push_back(n.substr(7));
    } else if (n == fmt::format("drop_lag{}", s.k + 1)) {
      ++s.k;
    } else {
      fail(ErrorCode::SchemaMismatch, fmt::format("unrecognized feature name '{}'", n));
    }
  }
  if (s.feature_names() != names) {
    fail(ErrorCode::SchemaMismatch, "feature names are not in schema order");
  }
  return s;
}

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> names;
  names.reserve(n_features());
  for (std::size_t i = 1; i <= k; ++i) names.push_back(fmt::format("drop_lag{}", i));
  for (const std::string& f : frequency.levels) names.push_back("freq=" + f);
  for (const std::string& r : region.levels) names.push_back("region=" + r);
  return names;
}

std::vector<double> FeatureSchema::encode(const PredictionRow& row) const {
  if (row.drop_history.size() != k) {
    fail(ErrorCode::SchemaMismatch, fmt::format("row has {} history values, schema expects {}",
                                                row.drop_history.size(), k));
  }
  std::vector<double> out;
  out.reserve(n_features());
  for (int bit : row.drop_history) out.push_back(bit);
  for (int v : one_hot(row.frequency, frequency)) out.push_back(v);
  for (int v : one_hot(row.region, region)) out.push_back(v);
  return out;
}

Dataset FeatureSchema::encode(std::span<const FeatureRow> rows) const {
  Dataset d;
  d.n_features = n_features();
  d.feature_names = feature_names();
  d.x.reserve(rows.size() * d.n_features);
  d.y.reserve(rows.size());
  for (const FeatureRow& r : rows) d.add_row(encode(static_cast<const PredictionRow&>(r)), to_int(r.target));
  return d;
}

std::vector<FeatureRow> build_window_rows(const LabeledHistory& history,
                                          const UnitProfile& profile,
                                          const ScheduleSpec& schedule, std::size_t k) {
  std::vector<const ScheduledOccasion*> labeled;
  for (const ScheduledOccasion& occ : history.occasions) {
    if (occ.label) labeled.push_back(&occ);
  }
  std::vector<FeatureRow> rows;
  if (k == 0 || labeled.size() <= k) return rows;
  const std::string freq = to_string(schedule.frequency);
  const std::string region{to_string(profile.region)};
  rows.reserve(labeled.size() - k);
  for (std::size_t j = k; j < labeled.size(); ++j) {
    FeatureRow row;
    row.unit_id = history.unit_id.empty() ? profile.unit_id : history.unit_id;
    row.scheduled_time = labeled[j]->scheduled_time;
    row.drop_history.reserve(k);
    for (std::size_t lag = 1; lag <= k; ++lag) {
      row.drop_history.push_back(to_int(*labeled[j - lag]->label));
    }
    row.frequency = freq;
    row.region = region;
    row.target = *labeled[j]->label;
    rows.push_back(std::move(row));
  }
  return rows;
}

FeatureRanking rank_features(const Dataset& data) {
  FeatureRanking ranking;
  std::vector<double> column(data.n_rows());
  for (std::size_t j = 0; j < data.n_features; ++j) {
    for (std::size_t i = 0; i < data.n_rows(); ++i) column[i] = data.at(i, j);
    ranking.scores.push_back(
        {data.feature_names.at(j), info_gain<double>(column, data.y), std::nullopt});
  }
  std::sort(ranking.scores.begin(), ranking.scores.end(),
            [](const FeatureScore& a, const FeatureScore& b) {
              if (a.info_gain_bits != b.info_gain_bits) return a.info_gain_bits > b.info_gain_bits;
              return a.name < b.name;
            });
  return ranking;
}

void attach_importance(FeatureRanking& ranking, const std::vector<std::string>& names,
                       std::span<const double> importance) {
  for (FeatureScore& s : ranking.scores) {
    const auto it = std::find(names.begin(), names.end(), s.name);
    if (it != names.end()) {
      s.normalized_importance = importance[static_cast<std::size_t>(it - names.begin())];
    }
  }
}

std::vector<SweepPoint> sweep_window_size(const RowBuilder& builder, const SweepOptions& options) {
  if (options.k_min < 1 || options.k_max < options.k_min) {
    fail(ErrorCode::InvalidConfig,
         fmt::format("invalid sweep range {}..{}", options.k_min, options.k_max));
  }
  std::vector<SweepPoint> out;
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
    const std::vector<FeatureRow> rows = builder(k);
    if (rows.empty()) {
      fail(ErrorCode::InsufficientData, fmt::format("no units have more than {} occasions", k));
    }
    const FeatureSchema schema = FeatureSchema::fit(rows, k);
    const Dataset data = schema.encode(rows);
    const SplitIndices split = split_indices(data.n_rows(), options.train_ratio, options.split_seed);
    const Dataset train = data.subset(split.train);
    const Dataset valid = data.subset(split.validation);
    const TrainedModel model = train_model(train, options.learner);
    const double auc = roc_auc(predict_proba(model, valid), valid.y);
    spdlog::info("sweep k={} rows={} auc={:.4f}", k, rows.size(), auc);
    out.push_back({k, auc});
  }
  return out;
}

}  // namespace adherence
