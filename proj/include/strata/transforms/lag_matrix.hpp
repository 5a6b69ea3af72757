#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strata/core/log.hpp"
#include "strata/core/matrix.hpp"
#include "strata/core/schema.hpp"
#include "strata/data/frame.hpp"
#include "strata/transforms/calendar_features.hpp"
#include "strata/transforms/id_features.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

/// One transformed per-point sequence aligned with the source series: entry i
/// corresponds to the source's i-th timestamp and is defined for
/// i >= valid_from (differencing consumes leading points).
struct SeriesView {
  std::vector<double> values;
  std::size_t valid_from = 0;
};

/// A series with both processed views plus raw exogenous columns, ready for
/// wide-row assembly. Feature windows read from `features`, target windows
/// from `target`; the two differ when a series transform applies to only one.
struct PreparedSeries {
  std::string id;
  std::vector<std::int64_t> timestamps;
  SeriesView features;
  SeriesView target;
  std::vector<std::string> exog_names;
  std::vector<std::vector<double>> exog;  // [column][row], aligned with timestamps

  std::size_t length() const { return timestamps.size(); }

  static PreparedSeries raw(const Series& s, const std::vector<ExogColumn>& exog_columns) {
    PreparedSeries ps;
    ps.id = s.id;
    ps.timestamps = s.timestamps;
    ps.features.values = s.target;
    ps.target.values = s.target;
    for (const auto& col : exog_columns) ps.exog_names.push_back(col.name);
    ps.exog = s.exog;
    return ps;
  }
};

/// Inverse-transform bookkeeping for one wide row: which series it belongs to
/// (empty for channel-mixing rows), the timestamp of its last history point,
/// and the pre-window-normalization lag-0 target feature per block.
struct RowAnchor {
  std::string series_id;
  std::int64_t anchor_ts = 0;
  std::vector<double> last_known;

  bool operator==(const RowAnchor&) const = default;
};

/// Wide sample matrix: features X, targets Y (zero columns for inference
/// rows), column/target metadata, and one anchor per row.
struct FeatureMatrix {
  FeatureSchema schema;
  Matrix X;
  Matrix Y;
  std::vector<RowAnchor> anchors;
  std::vector<std::string> skipped;  // series left out (too short), with reason

  std::size_t n_rows() const { return X.rows; }
};

struct MatrixBuildOptions {
  std::size_t history = 1;
  std::size_t mh = 1;
  std::size_t target_offset = 0;  // direct segment k shifts targets by k*mh
  std::vector<DatetimePart> datetime_parts;
  const IdEncoder* id_encoder = nullptr;  // pooled mode only
  FrequencySpec freq = FrequencySpec::integer();
};

namespace detail {

/// Valid anchor indices [first, last] for one prepared series, or nullopt.
/// An anchor t supplies features at t-history+1..t from the feature view and
/// targets at t+offset+1..t+offset+mh from the target view.
inline std::optional<std::pair<std::size_t, std::size_t>> anchor_range(
    const PreparedSeries& ps, const MatrixBuildOptions& opt, bool with_targets) {
  const std::int64_t n = static_cast<std::int64_t>(ps.length());
  const std::int64_t offset = static_cast<std::int64_t>(opt.target_offset);
  const std::int64_t mh = static_cast<std::int64_t>(opt.mh);
  std::int64_t first = static_cast<std::int64_t>(ps.features.valid_from) +
                       static_cast<std::int64_t>(opt.history) - 1;
  std::int64_t last = n - 1;
  if (with_targets) {
    first = std::max(first, static_cast<std::int64_t>(ps.target.valid_from) - offset - 1);
    last = n - 1 - offset - mh;
  }
  if (first > last || first < 0) return std::nullopt;
  return std::make_pair(static_cast<std::size_t>(first), static_cast<std::size_t>(last));
}

inline void append_block_columns(FeatureSchema& schema, const PreparedSeries& ps, int block,
                                 std::size_t history) {
  for (std::size_t k = 0; k < history; ++k) {
    ColumnInfo c;
    c.source = "y";
    c.lag = static_cast<std::int64_t>(history - 1 - k);  // oldest first, lag 0 last
    c.role = ColumnRole::TargetLag;
    c.block = block;
    c.target_derived = true;
    schema.columns.push_back(c);
  }
  for (const auto& name : ps.exog_names) {
    for (std::size_t k = 0; k < history; ++k) {
      ColumnInfo c;
      c.source = name;
      c.lag = static_cast<std::int64_t>(history - 1 - k);
      c.role = ColumnRole::ExogLag;
      c.block = block;
      schema.columns.push_back(c);
    }
  }
}

inline void append_shared_columns(FeatureSchema& schema, const MatrixBuildOptions& opt) {
  for (DatetimePart p : opt.datetime_parts) {
    ColumnInfo c;
    c.source = std::string("dt_") + to_string(p);
    c.role = ColumnRole::Datetime;
    c.block = -1;
    schema.columns.push_back(c);
  }
  if (opt.id_encoder != nullptr) {
    for (const auto& name : opt.id_encoder->column_names()) {
      ColumnInfo c;
      c.source = name;
      c.role = ColumnRole::Id;
      c.block = -1;
      schema.columns.push_back(c);
    }
  }
}

/// Writes one block's lag window into `out` starting at `pos`; returns the
/// next write position. Exogenous values come from the raw columns.
inline std::size_t write_block_features(const PreparedSeries& ps, std::size_t t,
                                        std::size_t history, std::vector<double>& out,
                                        std::size_t pos) {
  for (std::size_t k = 0; k < history; ++k) out[pos++] = ps.features.values[t - history + 1 + k];
  for (const auto& col : ps.exog) {
    for (std::size_t k = 0; k < history; ++k) out[pos++] = col[t - history + 1 + k];
  }
  return pos;
}

}  // namespace detail

/// Pooled ("global") assembly: every series contributes its own rows and the
/// sample pool is their concatenation, ordered by (series id, anchor time).
/// Series too short for a single row are skipped with a warning; it is an
/// error only if nothing remains. Set `with_targets=false` to build
/// inference rows: one row per series at its final anchor, Y empty.
inline FeatureMatrix build_pooled_matrix(const std::vector<PreparedSeries>& series,
                                         const MatrixBuildOptions& opt,
                                         bool with_targets = true) {
  require(!series.empty(), ErrCode::EmptyDataset, "no series to build a sample matrix from");
  FeatureMatrix m;
  m.schema.history = opt.history;
  m.schema.block_ids = {"*"};
  detail::append_block_columns(m.schema, series.front(), 0, opt.history);
  detail::append_shared_columns(m.schema, opt);
  if (with_targets) {
    for (std::size_t j = 1; j <= opt.mh; ++j) {
      m.schema.targets.push_back(
          TargetInfo{0, static_cast<int>(opt.target_offset + j)});
    }
  }

  const std::size_t n_features = m.schema.n_features();
  const std::size_t n_targets = m.schema.n_targets();
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t n_rows = 0;

  for (const auto& ps : series) {
    const auto range = detail::anchor_range(ps, opt, with_targets);
    if (!range) {
      if (!with_targets) {
        raise(ErrCode::InsufficientHistory,
              "series '" + ps.id + "' supplies " + std::to_string(ps.length()) +
                  " usable points, need " + std::to_string(opt.history) + " for one feature row");
      }
      const std::string reason =
          "series '" + ps.id + "' too short for history=" + std::to_string(opt.history) +
          " mh=" + std::to_string(opt.mh) + " offset=" + std::to_string(opt.target_offset);
      m.skipped.push_back(reason);
      log::warn("skipping " + reason);
      continue;
    }
    const std::size_t first = range->first;
    const std::size_t last = range->second;
    std::vector<double> id_values;
    if (opt.id_encoder != nullptr) id_values = opt.id_encoder->encode(ps.id);
    for (std::size_t t = with_targets ? first : last; t <= last; ++t) {
      std::vector<double> row(n_features, 0.0);
      std::size_t pos = detail::write_block_features(ps, t, opt.history, row, 0);
      for (DatetimePart p : opt.datetime_parts) {
        row[pos++] = datetime_part_value(ps.timestamps[t], opt.freq, p);
      }
      for (double v : id_values) row[pos++] = v;
      xs.insert(xs.end(), row.begin(), row.end());
      if (with_targets) {
        for (std::size_t j = 1; j <= opt.mh; ++j) {
          ys.push_back(ps.target.values[t + opt.target_offset + j]);
        }
      }
      RowAnchor anchor;
      anchor.series_id = ps.id;
      anchor.anchor_ts = ps.timestamps[t];
      anchor.last_known = {ps.features.values[t]};
      m.anchors.push_back(std::move(anchor));
      ++n_rows;
    }
  }

  if (n_rows == 0) {
    raise(ErrCode::SeriesTooShort, "every series is too short for history=" +
                                       std::to_string(opt.history) +
                                       " mh=" + std::to_string(opt.mh));
  }
  m.X = Matrix(n_rows, n_features, std::move(xs));
  m.Y = Matrix(n_rows, with_targets ? n_targets : 0, std::move(ys));
  return m;
}

/// Channel-mixing assembly: all series must be aligned; each anchor time
/// yields one row whose features concatenate every series' lag window and
/// whose targets stack every series' future block (width series x mh).
inline FeatureMatrix build_channel_mixing_matrix(const std::vector<PreparedSeries>& series,
                                                 const MatrixBuildOptions& opt,
                                                 bool with_targets = true) {
  require(!series.empty(), ErrCode::EmptyDataset, "no series to build a sample matrix from");
  require(opt.id_encoder == nullptr, ErrCode::ConstraintError,
          "id features are undefined in multivariate mode: every row spans all series");
  for (std::size_t s = 1; s < series.size(); ++s) {
    if (series[s].timestamps != series[0].timestamps) {
      raise(ErrCode::NotAligned, "multivariate mode requires aligned series; '" + series[s].id +
                                     "' differs from '" + series[0].id + "'");
    }
  }

  FeatureMatrix m;
  m.schema.history = opt.history;
  for (std::size_t s = 0; s < series.size(); ++s) {
    m.schema.block_ids.push_back(series[s].id);
    detail::append_block_columns(m.schema, series[s], static_cast<int>(s), opt.history);
  }
  detail::append_shared_columns(m.schema, opt);
  if (with_targets) {
    for (std::size_t s = 0; s < series.size(); ++s) {
      for (std::size_t j = 1; j <= opt.mh; ++j) {
        m.schema.targets.push_back(
            TargetInfo{static_cast<int>(s), static_cast<int>(opt.target_offset + j)});
      }
    }
  }

  // The shared anchor range is the intersection across series.
  std::optional<std::pair<std::size_t, std::size_t>> shared;
  for (const auto& ps : series) {
    const auto range = detail::anchor_range(ps, opt, with_targets);
    if (!range) {
      raise(with_targets ? ErrCode::SeriesTooShort : ErrCode::InsufficientHistory,
            "series '" + ps.id + "' too short for history=" + std::to_string(opt.history) +
                " mh=" + std::to_string(opt.mh) + " offset=" + std::to_string(opt.target_offset));
    }
    if (!shared) {
      shared = range;
    } else {
      shared->first = std::max(shared->first, range->first);
      shared->second = std::min(shared->second, range->second);
    }
  }
  if (shared->first > shared->second) {
    raise(ErrCode::SeriesTooShort, "aligned series leave no common anchor for history=" +
                                       std::to_string(opt.history) +
                                       " mh=" + std::to_string(opt.mh));
  }

  const std::size_t n_features = m.schema.n_features();
  const std::size_t n_targets = m.schema.n_targets();
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t n_rows = 0;

  const std::size_t first = with_targets ? shared->first : shared->second;
  for (std::size_t t = first; t <= shared->second; ++t) {
    std::vector<double> row(n_features, 0.0);
    std::size_t pos = 0;
    for (const auto& ps : series) pos = detail::write_block_features(ps, t, opt.history, row, pos);
    for (DatetimePart p : opt.datetime_parts) {
      row[pos++] = datetime_part_value(series[0].timestamps[t], opt.freq, p);
    }
    xs.insert(xs.end(), row.begin(), row.end());
    RowAnchor anchor;
    anchor.anchor_ts = series[0].timestamps[t];
    for (const auto& ps : series) {
      if (with_targets) {
        for (std::size_t j = 1; j <= opt.mh; ++j) {
          ys.push_back(ps.target.values[t + opt.target_offset + j]);
        }
      }
      anchor.last_known.push_back(ps.features.values[t]);
    }
    m.anchors.push_back(std::move(anchor));
    ++n_rows;
  }

  m.X = Matrix(n_rows, n_features, std::move(xs));
  m.Y = Matrix(n_rows, with_targets ? n_targets : 0, std::move(ys));
  return m;
}

/// The plain long-to-wide conversion: raw values, pooled assembly, no extra
/// feature columns. Per series, anchors run t = history-1 .. T-1-mh, so each
/// contributes T - history - mh + 1 rows.
inline FeatureMatrix make_lag_matrix(const LongFrame& frame, std::size_t history, std::size_t mh) {
  require(history >= 1, ErrCode::ConstraintError, "history must be >= 1");
  require(mh >= 1, ErrCode::ConstraintError, "mh must be >= 1");
  std::vector<PreparedSeries> prepared;
  prepared.reserve(frame.n_series());
  for (const auto& s : frame.all_series()) {
    prepared.push_back(PreparedSeries::raw(s, frame.exog_columns()));
  }
  MatrixBuildOptions opt;
  opt.history = history;
  opt.mh = mh;
  opt.freq = frame.frequency();
  return build_pooled_matrix(prepared, opt);
}

/// Flattens a multi-step matrix to one row per (sample, horizon step): the
/// features are copied and extended with a horizon-index feature (1..H raw,
/// or H one-hot columns), and the targets narrow to one value per block.
/// Matrices without targets (inference rows) flatten to `horizon` rows each.
inline FeatureMatrix flatten_to_horizon_rows(const FeatureMatrix& m, std::size_t horizon,
                                             bool onehot_index = false) {
  require(horizon >= 1, ErrCode::ConstraintError, "horizon must be >= 1");
  const std::size_t blocks = m.schema.block_ids.size();
  const bool with_targets = m.schema.n_targets() > 0;
  if (with_targets) {
    require(m.schema.n_targets() == blocks * horizon, ErrCode::DimensionMismatch,
            "flatten expects " + std::to_string(blocks * horizon) + " targets, matrix has " +
                std::to_string(m.schema.n_targets()));
  }

  FeatureMatrix flat;
  flat.schema = m.schema;
  flat.schema.targets.clear();
  flat.skipped = m.skipped;
  const std::size_t index_columns = onehot_index ? horizon : 1;
  for (std::size_t h = 0; h < index_columns; ++h) {
    ColumnInfo c;
    c.source = onehot_index ? "horizon=" + std::to_string(h + 1) : "horizon";
    c.role = ColumnRole::HorizonIndex;
    c.block = -1;
    flat.schema.columns.push_back(c);
  }
  if (with_targets) {
    for (std::size_t b = 0; b < blocks; ++b) {
      flat.schema.targets.push_back(TargetInfo{static_cast<int>(b), 0});
    }
  }

  const std::size_t nf = m.schema.n_features();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(m.n_rows() * horizon * (nf + index_columns));
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    for (std::size_t h = 1; h <= horizon; ++h) {
      const auto row = m.X.row(r);
      xs.insert(xs.end(), row.begin(), row.end());
      if (onehot_index) {
        for (std::size_t k = 1; k <= horizon; ++k) xs.push_back(k == h ? 1.0 : 0.0);
      } else {
        xs.push_back(static_cast<double>(h));
      }
      if (with_targets) {
        for (std::size_t b = 0; b < blocks; ++b) {
          ys.push_back(m.Y.at(r, b * horizon + (h - 1)));
        }
      }
      flat.anchors.push_back(m.anchors[r]);
    }
  }
  flat.X = Matrix(m.n_rows() * horizon, nf + index_columns, std::move(xs));
  flat.Y = Matrix(m.n_rows() * horizon, with_targets ? blocks : 0, std::move(ys));
  return flat;
}

}  // namespace strata
