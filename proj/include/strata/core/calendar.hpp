#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "strata/core/error.hpp"

namespace strata {

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

/// Weekday with Monday = 0 .. Sunday = 6. 1970-01-01 was a Thursday.
inline int weekday_from_days(std::int64_t days) {
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int day_of_year(const CivilDate& cd) {
  static constexpr int cum[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
  int doy = cum[cd.month - 1] + cd.day;
  if (cd.month > 2 && is_leap_year(cd.year)) ++doy;
  return doy;
}

namespace detail {
inline int iso_weeks_in_year(int y) {
  auto jan1_wd = [](int year) { return weekday_from_days(days_from_civil(year, 1, 1)); };
  // 53-week years start on Thursday, or on Wednesday when leap.
  const int wd = jan1_wd(y);
  return (wd == 3 || (is_leap_year(y) && wd == 2)) ? 53 : 52;
}
}  // namespace detail

/// ISO-8601 week of year, 1..53.
inline int iso_week_from_days(std::int64_t days) {
  const CivilDate cd = civil_from_days(days);
  const int wd_iso = weekday_from_days(days) + 1;  // Monday = 1
  int week = (day_of_year(cd) - wd_iso + 10) / 7;
  if (week < 1) return detail::iso_weeks_in_year(cd.year - 1);
  if (week > detail::iso_weeks_in_year(cd.year)) return 1;
  return week;
}

/// Parses "YYYY-MM-DD". Returns nullopt on malformed input.
inline std::optional<std::int64_t> parse_iso_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
  }
  const int y = std::stoi(text.substr(0, 4));
  const int m = std::stoi(text.substr(5, 2));
  const int d = std::stoi(text.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  const std::int64_t days = days_from_civil(y, m, d);
  const CivilDate back = civil_from_days(days);
  if (back.year != y || back.month != m || back.day != d) return std::nullopt;
  return days;
}

inline std::string format_iso_date(std::int64_t days) {
  const CivilDate cd = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", cd.year, cd.month, cd.day);
  return buf;
}

}  // namespace strata
