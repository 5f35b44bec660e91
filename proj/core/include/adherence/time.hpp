#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace adherence {

/// UTC instant at second precision. All timestamps in the pipeline use it.
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Days = std::chrono::days;

/// Parses `YYYY-MM-DDThh:mm:ssZ` or a bare `YYYY-MM-DD` (midnight UTC).
/// Returns nullopt on anything else, including out-of-range fields.
std::optional<Instant> try_parse_instant(std::string_view text);

/// Throwing variant; raises InvalidTimestamp.
Instant parse_instant(std::string_view text);

std::string format_instant(Instant t);
std::string format_date(Instant t);

/// Midnight UTC of the day containing `t`.
Instant start_of_day(Instant t);

Instant make_instant(int year, unsigned month, unsigned day, int hour = 0,
                     int minute = 0, int second = 0);

/// Hours expressed in whole seconds (rounded to nearest).
Seconds hours_to_seconds(double hours);

}  // namespace adherence
