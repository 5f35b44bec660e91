#pragma once

#include <span>
#include <string>
#include <vector>

#include "adherence/domain.hpp"

namespace adherence {

/// A unit's occasions with labels assigned, in chronological order.
struct LabeledHistory {
  std::string unit_id;
  std::vector<ScheduledOccasion> occasions;
  std::vector<DropEvent> unmatched_drops;
};

/// Occasions at start, start+period, ... up to and including horizon_end.
/// Each window is [t - wma/2, t - wma/2 + wma).
std::vector<ScheduledOccasion> expand_schedule(const ScheduleSpec& spec, Instant horizon_end);

/// Greedy chronological matching: each drop, in time order, goes to the
/// earliest still-unmatched occasion whose window contains it. Occasions
/// with a drop are OnTime, all others NotOnTime.
/// Throws UnsortedInput if occasions are not strictly increasing or drops
/// are not non-decreasing in time.
LabeledHistory assign_labels(std::vector<ScheduledOccasion> occasions,
                             std::span<const DropEvent> drops);

/// Sorts drops by (timestamp, source, loading_dose) so that labeling is
/// independent of input order.
void sort_drops(std::vector<DropEvent>& drops);

}  // namespace adherence
