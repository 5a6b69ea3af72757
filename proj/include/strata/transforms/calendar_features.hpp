#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strata/core/calendar.hpp"
#include "strata/data/frame.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

namespace detail {

/// Representative day for a canonical timestamp: the day itself for daily
/// (or day-stepped) data, the first day of the period for month/year units.
inline std::int64_t representative_days(std::int64_t ts, const FrequencySpec& freq) {
  switch (freq.unit) {
    case TimeUnit::Days: return ts;
    case TimeUnit::Months: {
      const std::int64_t m = ts;
      const std::int64_t y = m >= 0 ? m / 12 : -((-m + 11) / 12);
      return days_from_civil(static_cast<int>(1970 + y), static_cast<int>(m - y * 12) + 1, 1);
    }
    case TimeUnit::Years: return days_from_civil(static_cast<int>(1970 + ts), 1, 1);
    case TimeUnit::Ordinal: break;
  }
  raise(ErrCode::OrdinalTimestamps, "calendar feature requested on integer-ordinal timestamps");
}

}  // namespace detail

/// Numeric calendar feature of one timestamp. Weekday is Monday=0..Sunday=6;
/// week is the ISO-8601 week of year (1..53). Integer-ordinal frequencies
/// carry no calendar, so any part requested on them is an error.
inline double datetime_part_value(std::int64_t ts, const FrequencySpec& freq, DatetimePart part) {
  const std::int64_t days = detail::representative_days(ts, freq);
  const CivilDate cd = civil_from_days(days);
  switch (part) {
    case DatetimePart::Year: return static_cast<double>(cd.year);
    case DatetimePart::Month: return static_cast<double>(cd.month);
    case DatetimePart::Week: return static_cast<double>(iso_week_from_days(days));
    case DatetimePart::Day: return static_cast<double>(cd.day);
    case DatetimePart::Weekday: return static_cast<double>(weekday_from_days(days));
  }
  return 0.0;
}

/// Named calendar columns for a whole frame, aligned with each series' rows.
/// Values are plain numerics, usable like any other feature column.
struct DatetimeFeatureTable {
  std::vector<std::string> names;                          // "dt_year", ...
  std::vector<std::vector<std::vector<double>>> values;    // [series][part][row]
};

inline DatetimeFeatureTable make_datetime_features(const LongFrame& frame,
                                                   const std::vector<DatetimePart>& parts) {
  DatetimeFeatureTable table;
  for (DatetimePart p : parts) table.names.push_back(std::string("dt_") + to_string(p));
  table.values.resize(frame.n_series());
  for (std::size_t s = 0; s < frame.n_series(); ++s) {
    const Series& series = frame.series(s);
    table.values[s].resize(parts.size());
    for (std::size_t p = 0; p < parts.size(); ++p) {
      table.values[s][p].reserve(series.length());
      for (std::int64_t ts : series.timestamps) {
        table.values[s][p].push_back(datetime_part_value(ts, frame.frequency(), parts[p]));
      }
    }
  }
  return table;
}

}  // namespace strata
