#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adherence/csv.hpp"
#include "adherence/domain.hpp"
#include "adherence/error.hpp"
#include "adherence/labeling.hpp"
#include "adherence/rows.hpp"

namespace adherence {

inline constexpr std::string_view kDropsHeader = "unit_id,timestamp_utc,source,loading_dose";
inline constexpr std::string_view kScheduleHeader = "unit_id,start_date_utc,frequency,wma_hours";
inline constexpr std::string_view kUnitsHeader =
    "unit_id,region,activated_at_utc,deactivated_at_utc,last_comm_at_utc";

struct InputPaths {
  std::filesystem::path drops;
  std::filesystem::path schedule;
  std::filesystem::path units;
};

/// A row that failed typed validation, kept for the report.
struct QuarantinedRow {
  std::string table;
  std::size_t line = 0;
  std::string reason;
};

/// The three input tables at field level, with line provenance.
struct RawTables {
  CsvTable drops;
  CsvTable schedules;
  CsvTable units;
  std::vector<QuarantinedRow> quarantined;
};

/// Parses and validates the three CSV inputs. Rows failing typed
/// validation are quarantined; rows whose fields are all empty are kept for
/// `clean` to remove. Throws MissingColumn, UnreadableFile or
/// ForeignKeyViolation.
RawTables load_tables(const InputPaths& paths, Instant now);
RawTables load_tables_from_text(std::string_view drops_csv, std::string_view schedule_csv,
                                std::string_view units_csv, Instant now);

struct CleanReport {
  std::vector<QuarantinedRow> removed_empty;
  std::vector<QuarantinedRow> removed_duplicates;
  /// (table, column) pairs holding a single distinct value over all rows.
  std::vector<std::pair<std::string, std::string>> redundant_columns;
};

struct CleanResult {
  RawTables tables;
  CleanReport report;
};

/// Drops all-empty rows and exact duplicate rows; flags constant columns.
CleanResult clean(RawTables tables);

/// Typed records for the whole fleet.
struct FleetRecords {
  std::vector<UnitProfile> units;       // sorted by unit_id
  std::vector<ScheduleSpec> schedules;  // sorted by unit_id, one per unit
  std::vector<DropEvent> drops;         // sorted by (unit_id, timestamp)

  const UnitProfile* find_unit(std::string_view unit_id) const;
  const ScheduleSpec* find_schedule(std::string_view unit_id) const;
  /// Contiguous drops of one unit, sorted by time.
  std::span<const DropEvent> drops_of(std::string_view unit_id) const;
};

/// Converts cleaned tables to records. Quarantined rows are skipped.
/// A unit with several schedule rows keeps the first one (by line) and the
/// rest are reported in `quarantined`.
FleetRecords to_records(const RawTables& tables, Instant now,
                        std::vector<QuarantinedRow>* quarantined = nullptr);

/// Category levels fixed at fit time.
struct Vocabulary {
  std::vector<std::string> levels;

  std::size_t size() const { return levels.size(); }
  /// Index of `value`, or npos when unseen.
  std::size_t index_of(std::string_view value) const;
};

/// 0/1 vector with one 1 for an in-vocabulary value; all zeros (and a
/// logged warning) for an unseen value.
std::vector<int> one_hot(std::string_view value, const Vocabulary& vocabulary);

enum class ExclusionRule { Unplugged, Deactivated, SelfReported, LoadingDose };

std::string_view to_string(ExclusionRule rule) noexcept;

struct ExclusionEntry {
  std::string unit_id;
  Instant occasion_time;
  ExclusionRule rule;
};

inline constexpr Days kUnpluggedThreshold{30};

/// Which rule, if any, excludes this occasion. Rules are tried in the order
/// Unplugged, Deactivated, SelfReported, LoadingDose; first match wins.
std::optional<ExclusionRule> exclusion_for(const ScheduledOccasion& occasion,
                                           const UnitProfile& profile, Instant as_of);

struct ExclusionResult {
  LabeledHistory history;
  std::vector<ExclusionEntry> log;
};

ExclusionResult apply_exclusions(const LabeledHistory& history, const UnitProfile& profile,
                                 Instant as_of);

/// Index sets of a train/validation partition.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Number of training rows: ceil(n * ratio), robust to floating error in
/// the product.
std::size_t train_count(std::size_t n, double ratio);

/// Random row-level partition: train is the first ceil(n*ratio) entries of
/// a seeded permutation. Throws EmptyDataset for n = 0, InvalidRatio unless
/// 0 < ratio < 1.
SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed);
/// Same, applied within each label class.
SplitIndices split_indices_stratified(std::span<const int> labels, double ratio,
                                      std::uint64_t seed);
/// Whole units go to one side; ceil(units*ratio) units train.
SplitIndices split_indices_by_unit(std::span<const std::string> unit_ids, double ratio,
                                   std::uint64_t seed);

template <typename Row>
std::pair<std::vector<Row>, std::vector<Row>> split_train_validation(
    const std::vector<Row>& rows, double ratio, std::uint64_t seed) {
  const SplitIndices idx = split_indices(rows.size(), ratio, seed);
  std::pair<std::vector<Row>, std::vector<Row>> out;
  out.first.reserve(idx.train.size());
  out.second.reserve(idx.validation.size());
  for (std::size_t i : idx.train) out.first.push_back(rows[i]);
  for (std::size_t i : idx.validation) out.second.push_back(rows[i]);
  return out;
}

/// The features snapshot taken at midnight of the scheduled day and the
/// time the ground truth becomes available (window end).
struct PredictionFiles {
  PredictionRow row;
  Instant prediction_time;
  Instant testing_time;
  std::optional<AdherenceLabel> truth;  // set when history already labels the occasion
};

inline constexpr std::size_t kDefaultHistoryLength = 6;

/// Builds the prediction snapshot for the occasion scheduled on `day`.
/// History is the `k` most recent labeled occasions scheduled strictly
/// before midnight of `day`, latest first. Throws NoScheduledOccasion if the
/// schedule has no occasion that day and InsufficientHistory if fewer than
/// k prior occasions exist.
PredictionFiles make_prediction_and_testing_files(const LabeledHistory& history,
                                                  const ScheduleSpec& schedule,
                                                  const UnitProfile& profile, Instant day,
                                                  std::size_t k = kDefaultHistoryLength);

}  // namespace adherence
