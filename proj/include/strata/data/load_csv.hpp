#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "strata/core/csv.hpp"
#include "strata/data/frame.hpp"

namespace strata {

/// Maps source columns to roles. Exactly one id, datetime and target column;
/// exogenous columns default to "every remaining column" unless listed.
struct RoleMap {
  std::string id_column;
  std::string datetime_column;
  std::string target_column;
  std::vector<std::string> exog_columns;
  bool explicit_exog = false;
};

namespace detail {

inline bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

inline bool parse_int64(const std::string& text, std::int64_t& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

inline std::int64_t parse_timestamp(const std::string& text, const FrequencySpec& freq,
                                    std::size_t line_no) {
  std::int64_t as_int = 0;
  if (freq.unit == TimeUnit::Ordinal) {
    if (!parse_int64(text, as_int)) {
      raise(ErrCode::ParseError, "line " + std::to_string(line_no) + ": '" + text +
                                     "' is not an integer timestamp (frequency is 'integer'; "
                                     "use a calendar frequency for dates)");
    }
    return as_int;
  }
  const auto days = parse_iso_date(text);
  if (!days) {
    if (parse_int64(text, as_int)) {
      raise(ErrCode::ParseError,
            "line " + std::to_string(line_no) + ": integer timestamp '" + text +
                "' with a calendar frequency; declare frequency 'integer' instead");
    }
    raise(ErrCode::ParseError,
          "line " + std::to_string(line_no) + ": cannot parse date '" + text + "'");
  }
  switch (freq.unit) {
    case TimeUnit::Days: return *days;
    case TimeUnit::Months: {
      const CivilDate cd = civil_from_days(*days);
      return static_cast<std::int64_t>(cd.year - 1970) * 12 + (cd.month - 1);
    }
    case TimeUnit::Years: return civil_from_days(*days).year - 1970;
    case TimeUnit::Ordinal: break;
  }
  return *days;
}

}  // namespace detail

/// Loads a long-format CSV into a LongFrame sorted by (series_id, timestamp).
/// Calendar parsing happens here, once; downstream code sees integers only.
/// Unparseable numeric cells raise ParseError with their line number; an empty
/// target cell is recorded as NaN and left for validate_frame to report.
inline LongFrame load_long_csv(const std::string& path, const RoleMap& roles,
                               const FrequencySpec& freq, char delimiter = ',') {
  const csv::Table table = csv::read_file(path, delimiter);

  auto column_or_throw = [&](const std::string& name) {
    const int idx = table.column_index(name);
    if (idx < 0) raise(ErrCode::MissingColumn, "column '" + name + "' not found in " + path);
    return idx;
  };
  const int id_col = column_or_throw(roles.id_column);
  const int dt_col = column_or_throw(roles.datetime_column);
  const int tg_col = column_or_throw(roles.target_column);

  std::vector<std::string> exog_names;
  if (roles.explicit_exog) {
    for (const auto& name : roles.exog_columns) {
      column_or_throw(name);
      exog_names.push_back(name);
    }
  } else {
    for (const auto& name : table.header) {
      if (name != roles.id_column && name != roles.datetime_column &&
          name != roles.target_column) {
        exog_names.push_back(name);
      }
    }
  }
  std::vector<int> exog_idx;
  for (const auto& name : exog_names) exog_idx.push_back(table.column_index(name));

  if (table.rows.empty()) raise(ErrCode::EmptyDataset, path + " has a header but no rows");

  struct RawRow {
    std::int64_t ts;
    double target;
    std::vector<std::string> exog;
  };
  std::map<std::string, std::vector<RawRow>> by_series;

  std::size_t line_no = 1;
  for (const auto& row : table.rows) {
    ++line_no;
    RawRow raw;
    raw.ts = detail::parse_timestamp(row[dt_col], freq, line_no);
    const std::string& target_text = row[tg_col];
    if (target_text.empty()) {
      raw.target = std::numeric_limits<double>::quiet_NaN();
    } else if (!detail::parse_double(target_text, raw.target)) {
      raise(ErrCode::ParseError, "line " + std::to_string(line_no) + ": target '" + target_text +
                                     "' is not numeric");
    }
    for (int idx : exog_idx) raw.exog.push_back(row[idx]);
    by_series[row[id_col]].push_back(std::move(raw));
  }

  // Decide exogenous column types across the whole file: a column is numeric
  // iff every non-empty cell parses as a number; otherwise it is categorical
  // and gets a sorted vocabulary.
  std::vector<ExogColumn> exog_columns;
  std::vector<std::map<std::string, double>> vocab_codes(exog_names.size());
  for (std::size_t c = 0; c < exog_names.size(); ++c) {
    ExogColumn col;
    col.name = exog_names[c];
    std::set<std::string> values;
    for (const auto& [id, rows] : by_series) {
      for (const auto& r : rows) {
        double x;
        if (!r.exog[c].empty() && !detail::parse_double(r.exog[c], x)) {
          col.categorical = true;
        }
        values.insert(r.exog[c]);
      }
    }
    if (col.categorical) {
      col.vocabulary.assign(values.begin(), values.end());
      for (std::size_t v = 0; v < col.vocabulary.size(); ++v) {
        vocab_codes[c][col.vocabulary[v]] = static_cast<double>(v);
      }
    }
    exog_columns.push_back(std::move(col));
  }

  std::vector<Series> series_list;
  for (auto& [id, rows] : by_series) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.ts < b.ts; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].ts == rows[i - 1].ts) {
        raise(ErrCode::DuplicateKey, "series '" + id + "' has a duplicate timestamp " +
                                         format_timestamp(rows[i].ts, freq));
      }
    }
    Series s;
    s.id = id;
    s.exog.resize(exog_names.size());
    for (const auto& r : rows) {
      s.timestamps.push_back(r.ts);
      s.target.push_back(r.target);
      for (std::size_t c = 0; c < exog_names.size(); ++c) {
        double value;
        if (exog_columns[c].categorical) {
          value = vocab_codes[c].at(r.exog[c]);
        } else if (r.exog[c].empty()) {
          value = std::numeric_limits<double>::quiet_NaN();
        } else {
          detail::parse_double(r.exog[c], value);
        }
        s.exog[c].push_back(value);
      }
    }
    series_list.push_back(std::move(s));
  }

  return LongFrame(freq, std::move(exog_columns), std::move(series_list));
}

}  // namespace strata
