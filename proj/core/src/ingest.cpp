#include "adherence/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <set>
#include <spdlog/spdlog.h>
#include <unordered_set>

#include "adherence/rng.hpp"

namespace adherence {
namespace {

struct Columns {
  std::vector<std::size_t> index;  // position in file for each required column
};

Columns require_columns(const CsvTable& table, std::string_view header_spec) {
  Columns cols;
  for (const std::string& name : split_csv_line(header_spec)) {
    const std::size_t idx = table.column(name);
    if (idx == std::string_view::npos) {
      fail(ErrorCode::MissingColumn,
           fmt::format("{}: missing column '{}'", table.name, name));
    }
    cols.index.push_back(idx);
  }
  return cols;
}

const std::string& field(const CsvRow& row, const Columns& cols, std::size_t i) {
  static const std::string empty;
  const std::size_t idx = cols.index[i];
  return idx < row.fields.size() ? row.fields[idx] : empty;
}

double parse_real(const std::string& text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(ErrorCode::InvalidConfig, fmt::format("{} '{}' is not a number", what, text));
  }
  return v;
}

DropEvent parse_drop_row(const CsvRow& row, const Columns& c, Instant now) {
  DropEvent d;
  d.unit_id = field(row, c, 0);
  d.timestamp = parse_instant(field(row, c, 1));
  d.source = parse_drop_source(field(row, c, 2));
  const std::string& ld = field(row, c, 3);
  if (ld != "0" && ld != "1") {
    fail(ErrorCode::InvalidConfig, fmt::format("loading_dose must be 0 or 1, got '{}'", ld));
  }
  d.loading_dose = ld == "1";
  return validate_drop(d, now);
}

ScheduleSpec parse_schedule_row(const CsvRow& row, const Columns& c) {
  ScheduleSpec s;
  s.unit_id = field(row, c, 0);
  s.start_date = parse_instant(field(row, c, 1));
  s.frequency = parse_frequency(field(row, c, 2));
  s.wma_hours = parse_real(field(row, c, 3), "wma_hours");
  return validate_schedule(s);
}

UnitProfile parse_unit_row(const CsvRow& row, const Columns& c) {
  RawUnitProfile raw;
  raw.unit_id = field(row, c, 0);
  raw.region = field(row, c, 1);
  raw.activated_at = parse_instant(field(row, c, 2));
  if (const std::string& deact = field(row, c, 3); !deact.empty()) {
    raw.deactivated_at = parse_instant(deact);
  }
  raw.last_comm_at = parse_instant(field(row, c, 4));
  return validate_profile(raw);
}

/// Moves rows that fail `parse` out of the table into `quarantine`.
template <typename Parse>
void quarantine_invalid(CsvTable& table, std::vector<QuarantinedRow>& quarantine,
                        Parse&& parse) {
  std::vector<CsvRow> kept;
  kept.reserve(table.rows.size());
  for (CsvRow& row : table.rows) {
    if (row.all_empty()) {
      kept.push_back(std::move(row));
      continue;
    }
    if (row.fields.size() != table.header.size()) {
      quarantine.push_back({table.name, row.line,
                            fmt::format("expected {} fields, found {}", table.header.size(),
                                        row.fields.size())});
      continue;
    }
    try {
      parse(row);
      kept.push_back(std::move(row));
    } catch (const Error& e) {
      quarantine.push_back({table.name, row.line, e.what()});
    }
  }
  table.rows = std::move(kept);
}

void check_foreign_keys(const CsvTable& table, std::size_t unit_col,
                        const std::unordered_set<std::string>& known) {
  for (const CsvRow& row : table.rows) {
    if (row.all_empty()) continue;
    const std::string& id = row.fields[unit_col];
    if (!known.contains(id)) {
      fail(ErrorCode::ForeignKeyViolation,
           fmt::format("{}:{}: unit_id '{}' not present in units", table.name, row.line, id));
    }
  }
}

RawTables load_parsed(CsvTable drops, CsvTable schedules, CsvTable units, Instant now) {
  const Columns dc = require_columns(drops, kDropsHeader);
  const Columns sc = require_columns(schedules, kScheduleHeader);
  const Columns uc = require_columns(units, kUnitsHeader);

  // Foreign keys resolve against every unit id present in the file, even
  // for unit rows that are quarantined below.
  std::unordered_set<std::string> known;
  for (const CsvRow& row : units.rows) {
    if (!row.all_empty()) known.insert(field(row, uc, 0));
  }

  RawTables t;
  quarantine_invalid(units, t.quarantined, [&](const CsvRow& r) { parse_unit_row(r, uc); });
  quarantine_invalid(schedules, t.quarantined,
                     [&](const CsvRow& r) { parse_schedule_row(r, sc); });
  quarantine_invalid(drops, t.quarantined, [&](const CsvRow& r) { parse_drop_row(r, dc, now); });
  check_foreign_keys(drops, dc.index[0], known);
  check_foreign_keys(schedules, sc.index[0], known);

  for (const QuarantinedRow& q : t.quarantined) {
    spdlog::warn("quarantined {}:{}: {}", q.table, q.line, q.reason);
  }
  t.drops = std::move(drops);
  t.schedules = std::move(schedules);
  t.units = std::move(units);
  return t;
}

void clean_table(CsvTable& table, CleanReport& report) {
  std::vector<CsvRow> kept;
  std::set<std::vector<std::string>> seen;
  for (CsvRow& row : table.rows) {
    if (row.all_empty()) {
      report.removed_empty.push_back({table.name, row.line, "all fields empty"});
      continue;
    }
    if (!seen.insert(row.fields).second) {
      report.removed_duplicates.push_back({table.name, row.line, "exact duplicate row"});
      continue;
    }
    kept.push_back(std::move(row));
  }
  table.rows = std::move(kept);

  if (table.rows.size() < 2) return;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& first = table.rows.front().fields[c];
    const bool constant = std::all_of(table.rows.begin(), table.rows.end(),
                                      [&](const CsvRow& r) { return r.fields[c] == first; });
    if (constant) report.redundant_columns.emplace_back(table.name, table.header[c]);
  }
}

}  // namespace

RawTables load_tables(const InputPaths& paths, Instant now) {
  return load_parsed(read_csv(paths.drops), read_csv(paths.schedule), read_csv(paths.units),
                     now);
}

RawTables load_tables_from_text(std::string_view drops_csv, std::string_view schedule_csv,
                                std::string_view units_csv, Instant now) {
  return load_parsed(parse_csv(drops_csv, "drops.csv"), parse_csv(schedule_csv, "schedule.csv"),
                     parse_csv(units_csv, "units.csv"), now);
}

CleanResult clean(RawTables tables) {
  CleanResult result;
  clean_table(tables.units, result.report);
  clean_table(tables.schedules, result.report);
  clean_table(tables.drops, result.report);
  for (const auto& [table, column] : result.report.redundant_columns) {
    spdlog::info("{}: column '{}' holds a single value (redundant)", table, column);
  }
  result.tables = std::move(tables);
  return result;
}

const UnitProfile* FleetRecords::find_unit(std::string_view unit_id) const {
  const auto it = std::lower_bound(units.begin(), units.end(), unit_id,
                                   [](const UnitProfile& u, std::string_view id) {
                                     return u.unit_id < id;
                                   });
  return it != units.end() && it->unit_id == unit_id ? &*it : nullptr;
}

const ScheduleSpec* FleetRecords::find_schedule(std::string_view unit_id) const {
  const auto it = std::lower_bound(schedules.begin(), schedules.end(), unit_id,
                                   [](const ScheduleSpec& s, std::string_view id) {
                                     return s.unit_id < id;
                                   });
  return it != schedules.end() && it->unit_id == unit_id ? &*it : nullptr;
}

std::span<const DropEvent> FleetRecords::drops_of(std::string_view unit_id) const {
  const auto lo = std::lower_bound(
      drops.begin(), drops.end(), unit_id,
      [](const DropEvent& d, std::string_view id) { return d.unit_id < id; });
  const auto hi = std::upper_bound(
      lo, drops.end(), unit_id,
      [](std::string_view id, const DropEvent& d) { return id < d.unit_id; });
  return {lo, hi};
}

FleetRecords to_records(const RawTables& tables, Instant now,
                        std::vector<QuarantinedRow>* quarantined) {
  const Columns dc = require_columns(tables.drops, kDropsHeader);
  const Columns sc = require_columns(tables.schedules, kScheduleHeader);
  const Columns uc = require_columns(tables.units, kUnitsHeader);

  FleetRecords out;
  for (const CsvRow& row : tables.units.rows) {
    if (!row.all_empty()) out.units.push_back(parse_unit_row(row, uc));
  }
  std::unordered_set<std::string> scheduled;
  for (const CsvRow& row : tables.schedules.rows) {
    if (row.all_empty()) continue;
    ScheduleSpec s = parse_schedule_row(row, sc);
    if (!scheduled.insert(s.unit_id).second) {
      if (quarantined) {
        quarantined->push_back({tables.schedules.name, row.line,
                                fmt::format("second schedule for unit '{}'", s.unit_id)});
      }
      continue;
    }
    out.schedules.push_back(std::move(s));
  }
  for (const CsvRow& row : tables.drops.rows) {
    if (!row.all_empty()) out.drops.push_back(parse_drop_row(row, dc, now));
  }

  std::sort(out.units.begin(), out.units.end(),
            [](const auto& a, const auto& b) { return a.unit_id < b.unit_id; });
  std::sort(out.schedules.begin(), out.schedules.end(),
            [](const auto& a, const auto& b) { return a.unit_id < b.unit_id; });
  sort_drops(out.drops);
  std::stable_sort(out.drops.begin(), out.drops.end(),
                   [](const auto& a, const auto& b) { return a.unit_id < b.unit_id; });
  return out;
}

std::size_t Vocabulary::index_of(std::string_view value) const {
  const auto it = std::find(levels.begin(), levels.end(), value);
  return it == levels.end() ? std::string_view::npos
                            : static_cast<std::size_t>(it - levels.begin());
}

std::vector<int> one_hot(std::string_view value, const Vocabulary& vocabulary) {
  std::vector<int> v(vocabulary.size(), 0);
  const std::size_t idx = vocabulary.index_of(value);
  if (idx == std::string_view::npos) {
    spdlog::warn("category '{}' unseen at fit time; encoding as all zeros", value);
  } else {
    v[idx] = 1;
  }
  return v;
}

std::string_view to_string(ExclusionRule rule) noexcept {
  switch (rule) {
    case ExclusionRule::Unplugged: return "Unplugged";
    case ExclusionRule::Deactivated: return "Deactivated";
    case ExclusionRule::SelfReported: return "SelfReported";
    case ExclusionRule::LoadingDose: return "LoadingDose";
  }
  return "Unplugged";
}

std::optional<ExclusionRule> exclusion_for(const ScheduledOccasion& occasion,
                                           const UnitProfile& profile, Instant as_of) {
  if (as_of - profile.last_comm_at > kUnpluggedThreshold) return ExclusionRule::Unplugged;
  if (profile.deactivated_at) {
    const Instant prediction_time = start_of_day(occasion.scheduled_time);
    const Instant testing_time = occasion.window_end;
    if (prediction_time <= *profile.deactivated_at && *profile.deactivated_at < testing_time) {
      return ExclusionRule::Deactivated;
    }
  }
  if (occasion.matched_drop) {
    if (occasion.matched_drop->source != DropSource::Sensor) return ExclusionRule::SelfReported;
    if (occasion.matched_drop->loading_dose) return ExclusionRule::LoadingDose;
  }
  return std::nullopt;
}

ExclusionResult apply_exclusions(const LabeledHistory& history, const UnitProfile& profile,
                                 Instant as_of) {
  ExclusionResult result;
  result.history.unit_id = history.unit_id;
  result.history.unmatched_drops = history.unmatched_drops;
  for (const ScheduledOccasion& occ : history.occasions) {
    if (const auto rule = exclusion_for(occ, profile, as_of)) {
      result.log.push_back({occ.unit_id, occ.scheduled_time, *rule});
    } else {
      result.history.occasions.push_back(occ);
    }
  }
  return result;
}

std::size_t train_count(std::size_t n, double ratio) {
  const double x = static_cast<double>(n) * ratio;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

namespace {

void check_split_args(std::size_t n, double ratio) {
  if (n == 0) fail(ErrorCode::EmptyDataset, "cannot split an empty dataset");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    fail(ErrorCode::InvalidRatio, fmt::format("split ratio must be in (0,1), got {}", ratio));
  }
}

void warn_if_degenerate(const SplitIndices& s) {
  if (s.validation.empty()) {
    spdlog::warn("split produced an empty validation set ({} training rows)", s.train.size());
  }
}

}  // namespace

SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  check_split_args(n, ratio);
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  const std::size_t n_train = train_count(n, ratio);
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  warn_if_degenerate(s);
  return s;
}

SplitIndices split_indices_stratified(std::span<const int> labels, double ratio,
                                      std::uint64_t seed) {
  check_split_args(labels.size(), ratio);
  Rng rng(seed);
  SplitIndices s;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    rng.shuffle(members);
    const std::size_t n_train = train_count(members.size(), ratio);
    s.train.insert(s.train.end(), members.begin(),
                   members.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.insert(s.validation.end(),
                        members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  warn_if_degenerate(s);
  return s;
}

SplitIndices split_indices_by_unit(std::span<const std::string> unit_ids, double ratio,
                                   std::uint64_t seed) {
  check_split_args(unit_ids.size(), ratio);
  std::vector<std::string> units(unit_ids.begin(), unit_ids.end());
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  Rng rng(seed);
  rng.shuffle(units);
  const std::size_t n_train = train_count(units.size(), ratio);
  const std::set<std::string> train_units(units.begin(),
                                          units.begin() + static_cast<std::ptrdiff_t>(n_train));
  SplitIndices s;
  for (std::size_t i = 0; i < unit_ids.size(); ++i) {
    (train_units.contains(unit_ids[i]) ? s.train : s.validation).push_back(i);
  }
  warn_if_degenerate(s);
  return s;
}

PredictionFiles make_prediction_and_testing_files(const LabeledHistory& history,
                                                  const ScheduleSpec& schedule,
                                                  const UnitProfile& profile, Instant day,
                                                  std::size_t k) {
  const Instant midnight = start_of_day(day);
  const Seconds period = schedule.frequency.period();
  Instant target = schedule.start_date;
  if (target < midnight) {
    const auto steps = (midnight - target + period - Seconds{1}) / period;
    target += steps * period;
  }
  if (!(midnight <= target && target < midnight + Days{1})) {
    fail(ErrorCode::NoScheduledOccasion,
         fmt::format("unit {} has no occasion scheduled on {}", schedule.unit_id,
                     format_date(midnight)));
  }

  std::vector<int> prior;
  std::optional<AdherenceLabel> truth;
  for (auto it = history.occasions.rbegin(); it != history.occasions.rend(); ++it) {
    if (it->scheduled_time == target && it->label) truth = it->label;
    if (it->scheduled_time < midnight && it->label && prior.size() < k) {
      prior.push_back(to_int(*it->label));
    }
  }
  if (prior.size() < k) {
    fail(ErrorCode::InsufficientHistory,
         fmt::format("unit {} has {} labeled occasions before {}, need {}", schedule.unit_id,
                     prior.size(), format_date(midnight), k));
  }

  const Seconds width = schedule.wma();
  PredictionFiles files;
  files.row.unit_id = schedule.unit_id;
  files.row.scheduled_time = target;
  files.row.drop_history = std::move(prior);
  files.row.frequency = to_string(schedule.frequency);
  files.row.region = std::string(to_string(profile.region));
  files.prediction_time = midnight;
  files.testing_time = target - Seconds{width.count() / 2} + width;
  files.truth = truth;
  return files;
}

}  // namespace adherence
