#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"

namespace strata {

/// Per-series audit produced by validate_frame.
struct SeriesReport {
  std::string id;
  std::size_t length = 0;
  std::int64_t first_timestamp = 0;
  std::int64_t last_timestamp = 0;
  std::size_t irregularities = 0;   ///< deltas that differ from the declared step
  std::size_t missing_values = 0;   ///< NaN/inf targets or exogenous cells
};

struct ValidationReport {
  std::vector<SeriesReport> series;
  std::vector<std::string> violations;
  bool aligned = false;

  bool ok() const { return violations.empty(); }
};

/// True iff all series share an identical timestamp vector. Multivariate
/// shaping requires this; pooled (global) shaping does not.
inline bool check_alignment(const LongFrame& frame) {
  for (std::size_t s = 1; s < frame.n_series(); ++s) {
    if (frame.series(s).timestamps != frame.series(0).timestamps) return false;
  }
  return true;
}

/// Enumerates every invariant violation without modifying or rejecting the
/// frame: irregular spacing, non-finite targets, non-finite exogenous cells.
/// Strict timestamp ordering and key uniqueness are enforced at load time.
inline ValidationReport validate_frame(const LongFrame& frame) {
  ValidationReport report;
  const std::int64_t step = frame.frequency().step;

  for (std::size_t s = 0; s < frame.n_series(); ++s) {
    const Series& series = frame.series(s);
    SeriesReport sr;
    sr.id = series.id;
    sr.length = series.timestamps.size();
    if (!series.timestamps.empty()) {
      sr.first_timestamp = series.timestamps.front();
      sr.last_timestamp = series.timestamps.back();
    }
    for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
      const std::int64_t delta = series.timestamps[i] - series.timestamps[i - 1];
      if (delta != step) {
        ++sr.irregularities;
        report.violations.push_back(
            "series '" + series.id + "': gap of " + std::to_string(delta) + " (expected " +
            std::to_string(step) + ") after " +
            format_timestamp(series.timestamps[i - 1], frame.frequency()));
      }
    }
    for (std::size_t i = 0; i < series.target.size(); ++i) {
      if (!std::isfinite(series.target[i])) {
        ++sr.missing_values;
        report.violations.push_back("series '" + series.id + "': non-finite target at " +
                                    format_timestamp(series.timestamps[i], frame.frequency()));
      }
    }
    for (std::size_t c = 0; c < series.exog.size(); ++c) {
      for (std::size_t i = 0; i < series.exog[c].size(); ++i) {
        if (!std::isfinite(series.exog[c][i])) {
          ++sr.missing_values;
          report.violations.push_back("series '" + series.id + "': non-finite value in '" +
                                      frame.exog_columns()[c].name + "' at " +
                                      format_timestamp(series.timestamps[i], frame.frequency()));
        }
      }
    }
    report.series.push_back(std::move(sr));
  }

  report.aligned = check_alignment(frame);
  return report;
}

/// Splits off the last test_horizon points of every series. The two frames
/// partition the input: concatenating them per series reconstructs it.
inline std::pair<LongFrame, LongFrame> temporal_split(const LongFrame& frame,
                                                      std::size_t test_horizon) {
  require(test_horizon > 0, ErrCode::ConstraintError, "test_horizon must be positive");

  std::vector<Series> train_series;
  std::vector<Series> test_series;
  for (std::size_t s = 0; s < frame.n_series(); ++s) {
    const Series& series = frame.series(s);
    const std::size_t n = series.timestamps.size();
    if (n <= test_horizon) {
      raise(ErrCode::SeriesTooShort, "series '" + series.id + "' has " + std::to_string(n) +
                                         " points, need more than " +
                                         std::to_string(test_horizon) + " to split");
    }
    const std::size_t cut = n - test_horizon;
    auto take = [&](std::size_t begin, std::size_t end) {
      Series part;
      part.id = series.id;
      part.timestamps.assign(series.timestamps.begin() + begin, series.timestamps.begin() + end);
      part.target.assign(series.target.begin() + begin, series.target.begin() + end);
      for (const auto& col : series.exog) {
        part.exog.emplace_back(col.begin() + begin, col.begin() + end);
      }
      return part;
    };
    train_series.push_back(take(0, cut));
    test_series.push_back(take(cut, n));
  }

  return {LongFrame(frame.frequency(), frame.exog_columns(), std::move(train_series)),
          LongFrame(frame.frequency(), frame.exog_columns(), std::move(test_series))};
}

}  // namespace strata
