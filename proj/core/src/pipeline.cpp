#include "adherence/pipeline.hpp"

#include <algorithm>

#include "adherence/error.hpp"
#include "adherence/features.hpp"
#include "adherence/parallel.hpp"

namespace adherence {

FleetLabels label_fleet(const FleetRecords& fleet, Instant as_of) {
  std::vector<std::optional<UnitHistory>> slots(fleet.schedules.size());
  std::vector<std::vector<ExclusionEntry>> logs(fleet.schedules.size());
  std::vector<std::vector<ScheduledOccasion>> seen(fleet.schedules.size());
  parallel_for(fleet.schedules.size(), [&](std::size_t i) {
    const ScheduleSpec& spec = fleet.schedules[i];
    const UnitProfile* profile = fleet.find_unit(spec.unit_id);
    if (profile == nullptr || spec.start_date > as_of) return;
    std::vector<ScheduledOccasion> occasions = expand_schedule(spec, as_of);
    std::erase_if(occasions, [&](const ScheduledOccasion& o) { return o.window_end > as_of; });
    LabeledHistory labeled = assign_labels(std::move(occasions), fleet.drops_of(spec.unit_id));
    seen[i] = labeled.occasions;
    ExclusionResult filtered = apply_exclusions(labeled, *profile, as_of);
    logs[i] = std::move(filtered.log);
    slots[i] = UnitHistory{*profile, spec, std::move(filtered.history)};
  });
  FleetLabels out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) out.units.push_back(std::move(*slots[i]));
    out.exclusions.insert(out.exclusions.end(), logs[i].begin(), logs[i].end());
    out.all_occasions.insert(out.all_occasions.end(), seen[i].begin(), seen[i].end());
  }
  return out;
}

std::vector<FeatureRow> fleet_rows(const FleetLabels& labels, std::size_t k) {
  std::vector<FeatureRow> rows;
  for (const UnitHistory& u : labels.units) {
    std::vector<FeatureRow> unit_rows = build_window_rows(u.history, u.profile, u.schedule, k);
    std::move(unit_rows.begin(), unit_rows.end(), std::back_inserter(rows));
  }
  return rows;
}

Instant latest_communication(const FleetRecords& fleet) {
  if (fleet.units.empty()) fail(ErrorCode::EmptyDataset, "fleet has no units");
  Instant latest = fleet.units.front().last_comm_at;
  for (const UnitProfile& u : fleet.units) latest = std::max(latest, u.last_comm_at);
  return latest;
}

}  // namespace adherence
