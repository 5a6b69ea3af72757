#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/core/calendar.hpp"
#include "strata/core/error.hpp"

namespace strata {

/// Canonical timestamp unit. Calendar datetimes are normalized to integers at
/// load time (days / months / years since 1970); downstream code only sees
/// integers advancing by `step`.
enum class TimeUnit { Ordinal, Days, Months, Years };

struct FrequencySpec {
  TimeUnit unit = TimeUnit::Ordinal;
  std::int64_t step = 1;

  bool calendar() const { return unit != TimeUnit::Ordinal; }

  static FrequencySpec daily() { return {TimeUnit::Days, 1}; }
  static FrequencySpec weekly() { return {TimeUnit::Days, 7}; }
  static FrequencySpec monthly() { return {TimeUnit::Months, 1}; }
  static FrequencySpec yearly() { return {TimeUnit::Years, 1}; }
  static FrequencySpec integer(std::int64_t step = 1) { return {TimeUnit::Ordinal, step}; }

  bool operator==(const FrequencySpec&) const = default;
};

/// Renders a canonical timestamp back into the dataset's native notation.
inline std::string format_timestamp(std::int64_t ts, const FrequencySpec& freq) {
  switch (freq.unit) {
    case TimeUnit::Days: return format_iso_date(ts);
    case TimeUnit::Months: {
      const std::int64_t y = 1970 + (ts >= 0 ? ts / 12 : (ts - 11) / 12);
      const int m = static_cast<int>(ts - (y - 1970) * 12) + 1;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%04lld-%02d", static_cast<long long>(y), m);
      return buf;
    }
    case TimeUnit::Years: return std::to_string(1970 + ts);
    case TimeUnit::Ordinal: return std::to_string(ts);
  }
  return std::to_string(ts);
}

struct ExogColumn {
  std::string name;
  bool categorical = false;
  std::vector<std::string> vocabulary;  // sorted; codes index into it
};

/// One series of a long-format dataset, stored columnar.
struct Series {
  std::string id;
  std::vector<std::int64_t> timestamps;
  std::vector<double> target;
  std::vector<std::vector<double>> exog;  // [column][row]; categorical values hold codes

  std::size_t length() const { return timestamps.size(); }
};

/// Tidy multi-series dataset. Immutable by convention after load: every
/// operation returns a new frame, so sharing across workers is safe.
class LongFrame {
public:
  LongFrame() = default;
  LongFrame(FrequencySpec freq, std::vector<ExogColumn> exog_columns, std::vector<Series> series)
      : freq_(freq), exog_columns_(std::move(exog_columns)), series_(std::move(series)) {
    std::sort(series_.begin(), series_.end(),
              [](const Series& a, const Series& b) { return a.id < b.id; });
  }

  const FrequencySpec& frequency() const { return freq_; }
  const std::vector<ExogColumn>& exog_columns() const { return exog_columns_; }
  std::size_t n_series() const { return series_.size(); }
  const Series& series(std::size_t i) const { return series_[i]; }
  const std::vector<Series>& all_series() const { return series_; }

  const Series& series(const std::string& id) const {
    const auto idx = find(id);
    require(idx.has_value(), ErrCode::UnknownSeries, "series id '" + id + "' not in frame");
    return series_[*idx];
  }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = std::lower_bound(series_.begin(), series_.end(), id,
                               [](const Series& s, const std::string& key) { return s.id < key; });
    if (it == series_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - series_.begin());
  }

  std::size_t total_rows() const {
    std::size_t n = 0;
    for (const auto& s : series_) n += s.length();
    return n;
  }

  std::vector<std::string> series_ids() const {
    std::vector<std::string> ids;
    ids.reserve(series_.size());
    for (const auto& s : series_) ids.push_back(s.id);
    return ids;
  }

  /// Per-series suffix with timestamps >= from (fixed-window training).
  LongFrame slice_from(std::int64_t from) const {
    std::vector<Series> out;
    out.reserve(series_.size());
    for (const auto& s : series_) {
      auto it = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), from);
      const std::size_t k = static_cast<std::size_t>(it - s.timestamps.begin());
      Series cut;
      cut.id = s.id;
      cut.timestamps.assign(s.timestamps.begin() + k, s.timestamps.end());
      cut.target.assign(s.target.begin() + k, s.target.end());
      for (const auto& col : s.exog) cut.exog.emplace_back(col.begin() + k, col.end());
      out.push_back(std::move(cut));
    }
    return LongFrame(freq_, exog_columns_, std::move(out));
  }

  /// Per-series prefix with timestamps <= origin.
  LongFrame slice_until(std::int64_t origin) const {
    std::vector<Series> out;
    out.reserve(series_.size());
    for (const auto& s : series_) {
      auto it = std::upper_bound(s.timestamps.begin(), s.timestamps.end(), origin);
      const std::size_t n = static_cast<std::size_t>(it - s.timestamps.begin());
      Series cut;
      cut.id = s.id;
      cut.timestamps.assign(s.timestamps.begin(), s.timestamps.begin() + n);
      cut.target.assign(s.target.begin(), s.target.begin() + n);
      for (const auto& col : s.exog) cut.exog.emplace_back(col.begin(), col.begin() + n);
      out.push_back(std::move(cut));
    }
    return LongFrame(freq_, exog_columns_, std::move(out));
  }

private:
  FrequencySpec freq_;
  std::vector<ExogColumn> exog_columns_;
  std::vector<Series> series_;  // sorted by id
};

}  // namespace strata
