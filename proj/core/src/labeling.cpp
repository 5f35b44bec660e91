#include "adherence/labeling.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <tuple>

#include "adherence/error.hpp"

namespace adherence {

std::vector<ScheduledOccasion> expand_schedule(const ScheduleSpec& spec, Instant horizon_end) {
  if (horizon_end < spec.start_date) {
    fail(ErrorCode::EmptyHorizon,
         fmt::format("horizon {} precedes first occasion {} for unit {}",
                     format_instant(horizon_end), format_instant(spec.start_date),
                     spec.unit_id));
  }
  const Seconds width = spec.wma();
  const Seconds half{width.count() / 2};
  const Seconds period = spec.frequency.period();

  std::vector<ScheduledOccasion> out;
  for (Instant t = spec.start_date; t <= horizon_end; t += period) {
    ScheduledOccasion occ;
    occ.unit_id = spec.unit_id;
    occ.scheduled_time = t;
    occ.window_start = t - half;
    occ.window_end = occ.window_start + width;
    out.push_back(std::move(occ));
  }
  return out;
}

LabeledHistory assign_labels(std::vector<ScheduledOccasion> occasions,
                             std::span<const DropEvent> drops) {
  for (std::size_t i = 1; i < occasions.size(); ++i) {
    if (!(occasions[i - 1].scheduled_time < occasions[i].scheduled_time)) {
      fail(ErrorCode::UnsortedInput, "occasions are not strictly increasing in time");
    }
  }
  for (std::size_t i = 1; i < drops.size(); ++i) {
    if (drops[i].timestamp < drops[i - 1].timestamp) {
      fail(ErrorCode::UnsortedInput, "drops are not sorted by timestamp");
    }
  }

  LabeledHistory history;
  if (!occasions.empty()) history.unit_id = occasions.front().unit_id;
  for (auto& occ : occasions) {
    occ.label.reset();
    occ.matched_drop.reset();
  }

  // Occasions before `lo` have windows that closed before the current drop
  // and can never match a later one.
  std::size_t lo = 0;
  for (const DropEvent& drop : drops) {
    while (lo < occasions.size() && occasions[lo].window_end <= drop.timestamp) ++lo;
    bool matched = false;
    for (std::size_t i = lo; i < occasions.size(); ++i) {
      ScheduledOccasion& occ = occasions[i];
      if (drop.timestamp < occ.window_start) break;
      if (occ.matched_drop || !occ.contains(drop.timestamp)) continue;
      occ.matched_drop = drop;
      matched = true;
      break;
    }
    if (!matched) history.unmatched_drops.push_back(drop);
  }

  for (auto& occ : occasions) {
    occ.label = occ.matched_drop ? AdherenceLabel::OnTime : AdherenceLabel::NotOnTime;
  }
  history.occasions = std::move(occasions);
  return history;
}

void sort_drops(std::vector<DropEvent>& drops) {
  std::sort(drops.begin(), drops.end(), [](const DropEvent& a, const DropEvent& b) {
    return std::tie(a.timestamp, a.unit_id, a.source, a.loading_dose) <
           std::tie(b.timestamp, b.unit_id, b.source, b.loading_dose);
  });
}

}  // namespace adherence
