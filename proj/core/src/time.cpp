#include "adherence/time.hpp"

#include <cmath>
#include <fmt/format.h>

#include "adherence/error.hpp"

namespace adherence {
namespace {

bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Instant> try_parse_instant(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (text.size() != 10 && text.size() != 20) return std::nullopt;
  if (!parse_digits(text, 0, 4, y) || text[4] != '-' ||
      !parse_digits(text, 5, 2, mo) || text[7] != '-' ||
      !parse_digits(text, 8, 2, d)) {
    return std::nullopt;
  }
  if (text.size() == 20) {
    if (text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z')
      return std::nullopt;
    if (!parse_digits(text, 11, 2, h) || !parse_digits(text, 14, 2, mi) ||
        !parse_digits(text, 17, 2, se)) {
      return std::nullopt;
    }
    if (h > 23 || mi > 59 || se > 59) return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Instant{std::chrono::sys_days{ymd}} + std::chrono::hours{h} +
         std::chrono::minutes{mi} + std::chrono::seconds{se};
}

Instant parse_instant(std::string_view text) {
  if (auto t = try_parse_instant(text)) return *t;
  fail(ErrorCode::InvalidTimestamp, fmt::format("unparseable timestamp '{}'", text));
}

std::string format_instant(Instant t) {
  const auto day = std::chrono::floor<Days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::string format_date(Instant t) {
  const std::chrono::year_month_day ymd{std::chrono::floor<Days>(t)};
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

Instant start_of_day(Instant t) { return std::chrono::floor<Days>(t); }

Instant make_instant(int year, unsigned month, unsigned day, int hour, int minute,
                     int second) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  return Instant{std::chrono::sys_days{ymd}} + std::chrono::hours{hour} +
         std::chrono::minutes{minute} + std::chrono::seconds{second};
}

Seconds hours_to_seconds(double hours) {
  return Seconds{static_cast<long long>(std::llround(hours * 3600.0))};
}

}  // namespace adherence
