#include "adherence/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <map>
#include <spdlog/spdlog.h>
#include <sstream>

#include "adherence/cli/manifest.hpp"
#include "adherence/csv.hpp"
#include "adherence/ensemble.hpp"
#include "adherence/features.hpp"
#include "adherence/ingest.hpp"
#include "adherence/metrics.hpp"
#include "adherence/model_io.hpp"
#include "adherence/pipeline.hpp"
#include "adherence/rng.hpp"
#include "adherence/synthgen.hpp"

namespace adherence::cli {
namespace {

namespace fs = std::filesystem;

// Streams derived from the master seed, one per consumer.
enum SeedStream : std::uint64_t { kSplitSeed = 11, kEnsembleSeed, kRankingSeed, kSweepSeed, kCurveSeed };

std::uint64_t seed_for(const RunConfig& c, SeedStream s) { return derive_seed(c.seed, s); }

fs::path write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  return path;
}

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

struct LoadedFleet {
  FleetRecords records;
  std::vector<QuarantinedRow> quarantined;
  Instant as_of;
};

LoadedFleet load_fleet(const RunConfig& c) {
  const Instant now = c.as_of.value_or(
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
  CleanResult cleaned =
      clean(load_tables({c.drops_path(), c.schedule_path(), c.units_path()}, now));
  LoadedFleet out;
  out.quarantined = cleaned.tables.quarantined;
  for (const auto* list : {&cleaned.report.removed_empty, &cleaned.report.removed_duplicates}) {
    out.quarantined.insert(out.quarantined.end(), list->begin(), list->end());
  }
  for (const auto& [table, column] : cleaned.report.redundant_columns) {
    spdlog::info("{}.{} holds a single value", table, column);
  }
  out.records = to_records(cleaned.tables, now, &out.quarantined);
  out.as_of = c.as_of.value_or(latest_communication(out.records));
  spdlog::info("loaded {} units, {} drops, {} quarantined rows; as of {}", out.records.units.size(),
               out.records.drops.size(), out.quarantined.size(), format_instant(out.as_of));
  return out;
}

// Scheduled times of the unit's last `n` occasions whose window has closed.
std::vector<Instant> holdout_targets(const UnitHistory& u, Instant as_of, std::size_t n) {
  std::vector<Instant> closed;
  for (const ScheduledOccasion& o : expand_schedule(u.schedule, as_of)) {
    if (o.window_end <= as_of) closed.push_back(o.scheduled_time);
  }
  const std::size_t keep = std::min(n, closed.size());
  return {closed.end() - static_cast<std::ptrdiff_t>(keep), closed.end()};
}

// Window rows whose target precedes every held-out occasion of its unit.
std::vector<FeatureRow> training_rows(const FleetLabels& labels, Instant as_of, std::size_t k,
                                      std::size_t holdout) {
  std::vector<FeatureRow> rows;
  for (const UnitHistory& u : labels.units) {
    const std::vector<Instant> held = holdout_targets(u, as_of, holdout);
    for (FeatureRow& r : build_window_rows(u.history, u.profile, u.schedule, k)) {
      if (held.empty() || r.scheduled_time < held.front()) rows.push_back(std::move(r));
    }
  }
  return rows;
}

Dataset encode_rows(const std::vector<FeatureRow>& rows, std::size_t k) {
  if (rows.empty()) {
    fail(ErrorCode::InsufficientData, fmt::format("no unit has more than {} labeled occasions", k));
  }
  return FeatureSchema::fit(rows, k).encode(rows);
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::InvalidLabel, fmt::format("'{}' is not a 0/1 label", text));
  }
  return v;
}

double parse_score(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 0.0 && v <= 1.0)) {
    fail(ErrorCode::InvalidLabel, fmt::format("'{}' is not a probability", text));
  }
  return v;
}

ModelConfig config_for(const RunConfig& c, ModelKind kind, std::uint64_t seed) {
  const auto it = c.models.find(kind);
  ModelConfig m = it != c.models.end() ? it->second : ModelConfig::defaults(kind);
  m.seed = seed;
  return m;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Synth: return "synth";
    case Command::Label: return "label";
    case Command::Features: return "features";
    case Command::Train: return "train";
    case Command::Predict: return "predict";
    case Command::Evaluate: return "evaluate";
    case Command::Sweep: return "sweep";
    case Command::LearningCurve: return "learning-curve";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Synth, Command::Label, Command::Features, Command::Train,
                    Command::Predict, Command::Evaluate, Command::Sweep, Command::LearningCurve}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::vector<fs::path> cmd_synth(const RunConfig& c) {
  GeneratorConfig g = c.synth;
  g.seed = c.synth_seed.value_or(c.seed);
  const GeneratedFleet fleet = generate_fleet(g);
  spdlog::info("generated {} units, {} drops", fleet.records.units.size(), fleet.records.drops.size());
  return write_fleet(fleet, c.out);
}

std::vector<fs::path> cmd_label(const RunConfig& c) {
  const LoadedFleet fleet = load_fleet(c);
  const FleetLabels labels = label_fleet(fleet.records, fleet.as_of);

  std::ostringstream occ, excl, quar;
  CsvWriter ow(occ);
  ow.write("unit_id", "scheduled_time_utc", "window_start_utc", "window_end_utc", "label",
           "matched_drop_utc");
  std::size_t on_time = 0, total = 0;
  for (const UnitHistory& u : labels.units) {
    for (const ScheduledOccasion& o : u.history.occasions) {
      ow.write(o.unit_id, format_instant(o.scheduled_time), format_instant(o.window_start),
               format_instant(o.window_end), to_int(*o.label),
               o.matched_drop ? format_instant(o.matched_drop->timestamp) : std::string());
      on_time += to_int(*o.label);
      ++total;
    }
  }
  CsvWriter ew(excl);
  ew.write("unit_id", "occasion_time_utc", "rule");
  for (const ExclusionEntry& e : labels.exclusions) {
    ew.write(e.unit_id, format_instant(e.occasion_time), to_string(e.rule));
  }
  CsvWriter qw(quar);
  qw.write("table", "line", "reason");
  for (const QuarantinedRow& q : fleet.quarantined) {
    qw.write(q.table, static_cast<unsigned long long>(q.line), q.reason);
  }
  spdlog::info("labeled {} occasions ({} on time), excluded {}", total, on_time,
               labels.exclusions.size());
  return {write_text(c.out / "labeled_occasions.csv", occ.str()),
          write_text(c.out / "exclusions.csv", excl.str()),
          write_text(c.out / "quarantine.csv", quar.str())};
}

std::vector<fs::path> cmd_features(const RunConfig& c) {
  const LoadedFleet fleet = load_fleet(c);
  const std::vector<FeatureRow> rows = fleet_rows(label_fleet(fleet.records, fleet.as_of), c.k);
  const Dataset data = encode_rows(rows, c.k);

  std::ostringstream feat;
  CsvWriter fw(feat);
  std::vector<std::string> header{"unit_id", "scheduled_time_utc"};
  for (std::size_t i = 1; i <= c.k; ++i) header.push_back(fmt::format("drop_lag{}", i));
  for (const char* h : {"frequency", "region", "target"}) header.emplace_back(h);
  fw.row(header);
  for (const FeatureRow& r : rows) {
    std::vector<std::string> fields{r.unit_id, format_instant(r.scheduled_time)};
    for (int bit : r.drop_history) fields.push_back(std::to_string(bit));
    fields.push_back(r.frequency);
    fields.push_back(r.region);
    fields.push_back(std::to_string(to_int(r.target)));
    fw.row(fields);
  }

  FeatureRanking ranking = rank_features(data);
  const TrainedModel trees =
      train_model(data, config_for(c, ModelKind::ExtraTrees, seed_for(c, kRankingSeed)));
  attach_importance(ranking, data.feature_names, tree_feature_importance(trees));
  std::ostringstream rank;
  CsvWriter rw(rank);
  rw.write("feature", "info_gain_bits", "normalized_importance");
  for (const FeatureScore& s : ranking.scores) {
    rw.write(s.name, s.info_gain_bits, opt(s.normalized_importance));
  }
  return {write_text(c.out / "features.csv", feat.str()),
          write_text(c.out / "ranking.csv", rank.str())};
}

std::vector<fs::path> cmd_train(const RunConfig& c) {
  const LoadedFleet fleet = load_fleet(c);
  const FleetLabels labels = label_fleet(fleet.records, fleet.as_of);
  const Dataset data =
      encode_rows(training_rows(labels, fleet.as_of, c.k, c.holdout_occasions), c.k);
  const SplitIndices split = split_indices(data.n_rows(), c.split_ratio, seed_for(c, kSplitSeed));
  spdlog::info("training on {} rows, validating on {} ({} occasions per unit held out)",
               split.train.size(), split.validation.size(), c.holdout_occasions);

  EnsembleOptions options;
  options.base = c.models;
  options.spaces = c.search;
  options.tune = c.tune;
  options.undersample = c.undersample;
  options.seed = seed_for(c, kEnsembleSeed);
  const TrainedEnsemble trained =
      train_ensemble(data.subset(split.train), data.subset(split.validation), options);

  const fs::path model = c.model_path();
  if (model.has_parent_path()) fs::create_directories(model.parent_path());
  save_ensemble(trained.ensemble, model);

  std::ostringstream report, metrics;
  CsvWriter w(report);
  w.write("member", "chosen_config", "cv_auc", "validation_auc");
  for (const MemberReport& m : trained.report.members) {
    w.write(to_string(m.kind), m.chosen, m.cv_auc, opt(m.validation_auc));
  }
  const MetricsBundle& b = trained.report.ensemble;
  const ConfusionMatrix& cm = trained.report.matrix;
  CsvWriter mw(metrics);
  mw.write("metric", "value");
  mw.write("accuracy", opt(b.accuracy));
  mw.write("precision", opt(b.precision));
  mw.write("recall", opt(b.recall));
  mw.write("specificity", opt(b.specificity));
  mw.write("f1", opt(b.f1));
  mw.write("roc_auc", opt(b.roc_auc));
  mw.write("tp", static_cast<unsigned long long>(cm.tp));
  mw.write("fn", static_cast<unsigned long long>(cm.fn));
  mw.write("fp", static_cast<unsigned long long>(cm.fp));
  mw.write("tn", static_cast<unsigned long long>(cm.tn));
  return {model, write_text(c.out / "validation_report.csv", report.str()),
          write_text(c.out / "validation_metrics.csv", metrics.str())};
}

std::vector<fs::path> cmd_predict(const RunConfig& c) {
  const VotingEnsemble ensemble = load_ensemble(c.model_path());
  const FeatureSchema schema = FeatureSchema::from_names(ensemble.members[0].feature_names);
  if (schema.k != c.k) {
    spdlog::warn("model was trained with k={}, config says k={}; using the model's", schema.k, c.k);
  }
  const LoadedFleet fleet = load_fleet(c);
  const FleetLabels labels = label_fleet(fleet.records, fleet.as_of);

  std::ostringstream pred, test, skipped;
  CsvWriter pw(pred), tw(test), sw(skipped);
  pw.write("unit_id", "scheduled_time_utc", "vote", "score");
  tw.write("unit_id", "scheduled_time_utc", "label");
  sw.write("unit_id", "day", "reason");
  std::size_t n_pred = 0, n_skip = 0;

  for (const UnitHistory& u : labels.units) {
    std::vector<Instant> days;
    if (c.predict_day) {
      days.push_back(*c.predict_day);
    } else {
      days = holdout_targets(u, fleet.as_of, c.holdout_occasions);
    }
    for (const Instant day : days) {
      PredictionFiles files;
      try {
        files = make_prediction_and_testing_files(u.history, u.schedule, u.profile, day, schema.k);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoScheduledOccasion && c.predict_day) continue;
        if (e.code() != ErrorCode::InsufficientHistory && e.code() != ErrorCode::NoScheduledOccasion) throw;
        spdlog::debug("{}", e.what());
        sw.write(u.profile.unit_id, format_date(day), to_string(e.code()));
        ++n_skip;
        continue;
      }
      if (!c.predict_day && !files.truth) {
        // The target occasion itself was excluded.
        sw.write(u.profile.unit_id, format_date(day), "Excluded");
        ++n_skip;
        continue;
      }
      const EnsemblePrediction p = predict(ensemble, schema.encode(files.row));
      pw.write(files.row.unit_id, format_instant(files.row.scheduled_time), to_int(p.label), p.score);
      if (files.truth) {
        tw.write(files.row.unit_id, format_instant(files.row.scheduled_time), to_int(*files.truth));
      }
      ++n_pred;
    }
  }
  spdlog::info("{} predictions, {} skipped", n_pred, n_skip);
  return {write_text(c.out / "predictions.csv", pred.str()),
          write_text(c.out / "testing.csv", test.str()),
          write_text(c.out / "skipped.csv", skipped.str())};
}

std::vector<fs::path> cmd_evaluate(const RunConfig& c) {
  const CsvTable preds = read_csv(c.predictions_path());
  const CsvTable truth = read_csv(c.testing_path());
  const auto col = [](const CsvTable& t, std::string_view name) {
    const std::size_t i = t.column(name);
    if (i == std::string::npos) {
      fail(ErrorCode::MissingColumn, fmt::format("{} has no column '{}'", t.name, name));
    }
    return i;
  };
  const std::size_t tu = col(truth, "unit_id"), tt = col(truth, "scheduled_time_utc"),
                    tl = col(truth, "label");
  std::map<std::pair<std::string, std::string>, int> labels;
  for (const CsvRow& r : truth.rows) {
    labels[{r.fields.at(tu), r.fields.at(tt)}] = to_int(label_from_int(parse_int(r.fields.at(tl))));
  }
  const std::size_t pu = col(preds, "unit_id"), pt = col(preds, "scheduled_time_utc"),
                    pv = col(preds, "vote"), ps = col(preds, "score");
  std::vector<int> y, votes;
  std::vector<double> scores;
  for (const CsvRow& r : preds.rows) {
    const auto it = labels.find({r.fields.at(pu), r.fields.at(pt)});
    if (it == labels.end()) continue;
    y.push_back(it->second);
    votes.push_back(to_int(label_from_int(parse_int(r.fields.at(pv)))));
    scores.push_back(parse_score(r.fields.at(ps)));
  }
  if (y.empty()) fail(ErrorCode::EmptyDataset, "no prediction has a matching testing label");

  const ConfusionMatrix cm = confusion(y, votes);
  const MetricsBundle b = bundle(cm, scores, y);
  std::ostringstream csv;
  CsvWriter w(csv);
  w.write("metric", "value");
  const std::pair<const char*, std::optional<double>> rows[] = {
      {"accuracy", b.accuracy}, {"precision", b.precision}, {"recall", b.recall},
      {"specificity", b.specificity}, {"f1", b.f1}, {"roc_auc", b.roc_auc}};
  nlohmann::ordered_json j;
  for (const auto& [name, v] : rows) {
    w.write(name, opt(v));
    j[name] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  }
  j["confusion"] = {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
  j["n"] = y.size();

  std::vector<fs::path> out{write_text(c.out / "metrics.csv", csv.str()),
                            write_text(c.out / "metrics.json", j.dump(2) + "\n")};
  if (b.roc_auc) {
    std::ostringstream roc;
    CsvWriter rw(roc);
    rw.write("threshold", "fpr", "tpr");
    for (const RocPoint& p : roc_curve(scores, y)) {
      rw.write(std::isinf(p.threshold) ? std::string("inf") : format_real(p.threshold), p.fpr, p.tpr);
    }
    out.push_back(write_text(c.out / "roc.csv", roc.str()));
  }
  spdlog::info("evaluated {} predictions: accuracy {}", y.size(), opt(b.accuracy));
  return out;
}

std::vector<fs::path> cmd_sweep(const RunConfig& c) {
  const LoadedFleet fleet = load_fleet(c);
  const FleetLabels labels = label_fleet(fleet.records, fleet.as_of);
  SweepOptions options;
  options.k_min = c.sweep_k_min;
  options.k_max = c.sweep_k_max;
  options.train_ratio = c.split_ratio;
  options.split_seed = seed_for(c, kSplitSeed);
  options.learner = config_for(c, ModelKind::RandomForest, seed_for(c, kSweepSeed));
  const auto points =
      sweep_window_size([&](std::size_t k) { return fleet_rows(labels, k); }, options);
  std::ostringstream csv;
  CsvWriter w(csv);
  w.write("k", "roc_auc");
  for (const SweepPoint& p : points) w.write(static_cast<unsigned long long>(p.k), p.roc_auc);
  return {write_text(c.out / "sweep.csv", csv.str())};
}

std::vector<fs::path> cmd_learning_curve(const RunConfig& c) {
  const LoadedFleet fleet = load_fleet(c);
  const Dataset data = encode_rows(fleet_rows(label_fleet(fleet.records, fleet.as_of), c.k), c.k);
  const SplitIndices split = split_indices(data.n_rows(), c.split_ratio, seed_for(c, kSplitSeed));
  const Dataset train = data.subset(split.train);
  const Dataset test = data.subset(split.validation);

  std::vector<std::size_t> sizes = c.curve_sizes;
  if (sizes.empty()) {
    for (std::size_t i = 1; i <= c.curve_points; ++i) {
      const std::size_t s = std::max<std::size_t>(1, train.n_rows() * i / c.curve_points);
      if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
  }
  const std::uint64_t seed = seed_for(c, kCurveSeed);
  const LearningCurve curve =
      learning_curves(train, test, sizes, seed, [&](const Dataset& subset, const Dataset& held) {
        const VotingEnsemble e = fit_ensemble(subset, c.models, seed);
        auto labels_of = [&](const Dataset& d) {
          std::vector<int> out;
          for (const EnsemblePrediction& p : predict(e, d)) out.push_back(to_int(p.label));
          return out;
        };
        return std::pair{labels_of(subset), labels_of(held)};
      });
  std::ostringstream csv;
  CsvWriter w(csv);
  w.write("size", "split", "accuracy", "precision", "f1");
  for (const LearningCurvePoint& p : curve.points) {
    w.write(static_cast<unsigned long long>(p.size), p.split, opt(p.accuracy), opt(p.precision),
            opt(p.f1));
  }
  return {write_text(c.out / "learning_curve.csv", csv.str())};
}

std::vector<fs::path> run_command(Command command, const RunConfig& config) {
  validate(config);
  fs::create_directories(config.out);
  std::vector<fs::path> written;
  switch (command) {
    case Command::Synth: written = cmd_synth(config); break;
    case Command::Label: written = cmd_label(config); break;
    case Command::Features: written = cmd_features(config); break;
    case Command::Train: written = cmd_train(config); break;
    case Command::Predict: written = cmd_predict(config); break;
    case Command::Evaluate: written = cmd_evaluate(config); break;
    case Command::Sweep: written = cmd_sweep(config); break;
    case Command::LearningCurve: written = cmd_learning_curve(config); break;
  }
  written.push_back(write_manifest(config.out));
  return written;
}

int exit_code(const Error& e) noexcept {
  switch (e.category()) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Model: return 4;
  }
  return 1;
}

std::string error_line(const Error& e) {
  const char* category = e.category() == ErrorCategory::Config ? "config"
                         : e.category() == ErrorCategory::Data ? "data"
                                                               : "model";
  const nlohmann::json j = {{"error", std::string(to_string(e.code()))},
                            {"category", category},
                            {"message", e.what()}};
  return j.dump();
}

}  // namespace adherence::cli
