#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "adherence/time.hpp"

namespace adherence {

enum class DropSource { Sensor, SelfReported, Amended };

std::string_view to_string(DropSource s) noexcept;
/// Accepts the CSV spellings `sensor`, `self_reported`, `amended`.
DropSource parse_drop_source(std::string_view text);

/// One disposal event recorded by a bin.
struct DropEvent {
  std::string unit_id;
  Instant timestamp;
  DropSource source = DropSource::Sensor;
  bool loading_dose = false;

  friend bool operator==(const DropEvent&, const DropEvent&) = default;
};

struct Frequency {
  enum class Kind { Daily, Weekly, BiWeekly, Monthly28d, EveryNDays };

  Kind kind = Kind::Weekly;
  int every_n_days = 0;  // only meaningful for EveryNDays

  static Frequency daily() { return {Kind::Daily, 0}; }
  static Frequency weekly() { return {Kind::Weekly, 0}; }
  static Frequency biweekly() { return {Kind::BiWeekly, 0}; }
  static Frequency monthly28d() { return {Kind::Monthly28d, 0}; }
  static Frequency every(int n) { return {Kind::EveryNDays, n}; }

  Days period() const;

  friend bool operator==(const Frequency&, const Frequency&) = default;
};

/// CSV spelling: daily, weekly, biweekly, monthly28, every_<n>d.
std::string to_string(const Frequency& f);
Frequency parse_frequency(std::string_view text);

struct ScheduleSpec {
  std::string unit_id;
  Instant start_date;
  Frequency frequency;
  double wma_hours = 0.0;

  /// Window width in whole seconds.
  Seconds wma() const { return hours_to_seconds(wma_hours); }
};

enum class Region { NA, EU, AS, AF, AN, SA, OC };

inline constexpr std::array<Region, 7> kAllRegions{Region::NA, Region::EU, Region::AS,
                                                   Region::AF, Region::AN, Region::SA,
                                                   Region::OC};

std::string_view to_string(Region r) noexcept;
Region parse_region(std::string_view code);

struct UnitProfile {
  std::string unit_id;
  Region region = Region::NA;
  Instant activated_at;
  std::optional<Instant> deactivated_at;
  Instant last_comm_at;
};

/// Unit record as it arrives from a file, before the region code is checked.
struct RawUnitProfile {
  std::string unit_id;
  std::string region;
  Instant activated_at;
  std::optional<Instant> deactivated_at;
  Instant last_comm_at;
};

/// OnTime is the positive class everywhere.
enum class AdherenceLabel : int { NotOnTime = 0, OnTime = 1 };

constexpr int to_int(AdherenceLabel l) noexcept { return static_cast<int>(l); }
AdherenceLabel label_from_int(int v);
std::string_view to_string(AdherenceLabel l) noexcept;

struct ScheduledOccasion {
  std::string unit_id;
  Instant scheduled_time;
  Instant window_start;  // inclusive
  Instant window_end;    // exclusive
  std::optional<AdherenceLabel> label;
  std::optional<DropEvent> matched_drop;

  bool contains(Instant t) const { return window_start <= t && t < window_end; }
};

UnitProfile validate_profile(const RawUnitProfile& raw);
ScheduleSpec validate_schedule(const ScheduleSpec& spec);

/// Checks unit id and that the timestamp lies in [2000-01-01, now + 1 day].
DropEvent validate_drop(const DropEvent& drop, Instant now);

}  // namespace adherence
