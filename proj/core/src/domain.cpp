#include "adherence/domain.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "adherence/error.hpp"

namespace adherence {

std::string_view to_string(DropSource s) noexcept {
  switch (s) {
    case DropSource::Sensor: return "sensor";
    case DropSource::SelfReported: return "self_reported";
    case DropSource::Amended: return "amended";
  }
  return "sensor";
}

DropSource parse_drop_source(std::string_view text) {
  if (text == "sensor") return DropSource::Sensor;
  if (text == "self_reported") return DropSource::SelfReported;
  if (text == "amended") return DropSource::Amended;
  fail(ErrorCode::InvalidSource, fmt::format("unknown drop source '{}'", text));
}

Days Frequency::period() const {
  switch (kind) {
    case Kind::Daily: return Days{1};
    case Kind::Weekly: return Days{7};
    case Kind::BiWeekly: return Days{14};
    case Kind::Monthly28d: return Days{28};
    case Kind::EveryNDays: return Days{every_n_days};
  }
  return Days{7};
}

std::string to_string(const Frequency& f) {
  switch (f.kind) {
    case Frequency::Kind::Daily: return "daily";
    case Frequency::Kind::Weekly: return "weekly";
    case Frequency::Kind::BiWeekly: return "biweekly";
    case Frequency::Kind::Monthly28d: return "monthly28";
    case Frequency::Kind::EveryNDays: return fmt::format("every_{}d", f.every_n_days);
  }
  return "weekly";
}

Frequency parse_frequency(std::string_view text) {
  if (text == "daily") return Frequency::daily();
  if (text == "weekly") return Frequency::weekly();
  if (text == "biweekly") return Frequency::biweekly();
  if (text == "monthly28") return Frequency::monthly28d();
  constexpr std::string_view prefix = "every_";
  if (text.size() > prefix.size() + 1 && text.starts_with(prefix) && text.back() == 'd') {
    const auto digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && ptr == digits.data() + digits.size()) return Frequency::every(n);
  }
  fail(ErrorCode::InvalidFrequency, fmt::format("unknown frequency '{}'", text));
}

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::NA: return "NA";
    case Region::EU: return "EU";
    case Region::AS: return "AS";
    case Region::AF: return "AF";
    case Region::AN: return "AN";
    case Region::SA: return "SA";
    case Region::OC: return "OC";
  }
  return "NA";
}

Region parse_region(std::string_view code) {
  for (Region r : kAllRegions) {
    if (to_string(r) == code) return r;
  }
  fail(ErrorCode::InvalidRegion, fmt::format("unknown region code '{}'", code));
}

AdherenceLabel label_from_int(int v) {
  if (v == 0) return AdherenceLabel::NotOnTime;
  if (v == 1) return AdherenceLabel::OnTime;
  fail(ErrorCode::InvalidLabel, fmt::format("label encoding must be 0 or 1, got {}", v));
}

std::string_view to_string(AdherenceLabel l) noexcept {
  return l == AdherenceLabel::OnTime ? "OnTime" : "NotOnTime";
}

UnitProfile validate_profile(const RawUnitProfile& raw) {
  if (raw.unit_id.empty()) fail(ErrorCode::EmptyUnitId, "unit_id is empty");
  const Region region = parse_region(raw.region);
  if (raw.deactivated_at && *raw.deactivated_at < raw.activated_at) {
    fail(ErrorCode::InvalidTimeline,
         fmt::format("unit {} deactivated ({}) before activation ({})", raw.unit_id,
                     format_instant(*raw.deactivated_at), format_instant(raw.activated_at)));
  }
  return UnitProfile{raw.unit_id, region, raw.activated_at, raw.deactivated_at,
                     raw.last_comm_at};
}

ScheduleSpec validate_schedule(const ScheduleSpec& spec) {
  if (spec.unit_id.empty()) fail(ErrorCode::EmptyUnitId, "unit_id is empty");
  if (spec.frequency.kind == Frequency::Kind::EveryNDays && spec.frequency.every_n_days < 1) {
    fail(ErrorCode::InvalidFrequency,
         fmt::format("every_<n>d requires n >= 1, got {}", spec.frequency.every_n_days));
  }
  if (!(spec.wma_hours > 0.0) || !std::isfinite(spec.wma_hours) ||
      spec.wma().count() <= 0) {
    fail(ErrorCode::NonPositiveWindow,
         fmt::format("wma_hours must be positive, got {}", spec.wma_hours));
  }
  return spec;
}

DropEvent validate_drop(const DropEvent& drop, Instant now) {
  if (drop.unit_id.empty()) fail(ErrorCode::EmptyUnitId, "unit_id is empty");
  const Instant earliest = make_instant(2000, 1, 1);
  if (drop.timestamp < earliest || drop.timestamp > now + Days{1}) {
    fail(ErrorCode::InvalidTimestamp,
         fmt::format("drop timestamp {} outside [2000-01-01, now+1d]",
                     format_instant(drop.timestamp)));
  }
  return drop;
}

}  // namespace adherence
