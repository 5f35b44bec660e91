#pragma once

#include <cstddef>
#include <vector>

#include "adherence/domain.hpp"
#include "adherence/ingest.hpp"
#include "adherence/labeling.hpp"
#include "adherence/rows.hpp"

namespace adherence {

/// One unit's labeled, exclusion-filtered history with the records it
/// came from.
struct UnitHistory {
  UnitProfile profile;
  ScheduleSpec schedule;
  LabeledHistory history;
};

struct FleetLabels {
  std::vector<UnitHistory> units;  // unit_id order
  std::vector<ExclusionEntry> exclusions;
  std::vector<ScheduledOccasion> all_occasions;  // before exclusions, for reporting
};

/// Labels every occasion whose window has closed by `as_of` and applies the
/// exclusion rules. Units whose schedule starts after `as_of` contribute
/// nothing.
FleetLabels label_fleet(const FleetRecords& fleet, Instant as_of);

/// Window rows of every unit, in unit order then time order.
std::vector<FeatureRow> fleet_rows(const FleetLabels& labels, std::size_t k);

/// The latest last-communication time in the fleet; the natural "now" of a
/// data export.
Instant latest_communication(const FleetRecords& fleet);

}  // namespace adherence
