#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"
#include "strata/strategies/forecaster.hpp"

namespace strata {

struct Metrics {
  double mae = 0.0;
  double mse = 0.0;
};

/// Pools absolute/squared residuals incrementally; usable across series and
/// evaluation windows so the aggregate weighs every point equally.
struct MetricAccumulator {
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t n = 0;

  void add(double pred, double truth) {
    const double d = pred - truth;
    abs_sum += std::abs(d);
    sq_sum += d * d;
    ++n;
  }

  void merge(const MetricAccumulator& other) {
    abs_sum += other.abs_sum;
    sq_sum += other.sq_sum;
    n += other.n;
  }

  Metrics finish() const {
    require(n > 0, ErrCode::LengthMismatch, "no points to score");
    return {abs_sum / static_cast<double>(n), sq_sum / static_cast<double>(n)};
  }
};

/// MAE = mean |p-y|, MSE = mean (p-y)^2 over paired points.
inline Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth) {
  require(pred.size() == truth.size(), ErrCode::LengthMismatch,
          "prediction has " + std::to_string(pred.size()) + " points, truth has " +
              std::to_string(truth.size()));
  MetricAccumulator acc;
  for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], truth[i]);
  return acc.finish();
}

/// A scored forecast: per-series metrics plus the pooled aggregate over
/// every (series, step) point.
struct ForecastScore {
  std::map<std::string, Metrics> per_series;
  Metrics pooled;
  std::size_t n_points = 0;
};

/// Scores a forecast against observed values in `truth`, matching points by
/// (series, timestamp). Every forecast point must have a counterpart.
inline ForecastScore score_forecast(const Forecast& forecast, const LongFrame& truth) {
  ForecastScore score;
  MetricAccumulator pooled;
  for (std::size_t s = 0; s < forecast.n_series(); ++s) {
    const std::string& id = forecast.series_ids[s];
    const auto idx = truth.find(id);
    require(idx.has_value(), ErrCode::UnknownSeries,
            "truth frame has no series '" + id + "'");
    const Series& ts = truth.series(*idx);
    MetricAccumulator acc;
    for (std::size_t h = 0; h < forecast.values[s].size(); ++h) {
      const std::int64_t at = forecast.timestamps[s][h];
      const auto it = std::lower_bound(ts.timestamps.begin(), ts.timestamps.end(), at);
      if (it == ts.timestamps.end() || *it != at) {
        raise(ErrCode::LengthMismatch,
              "series '" + id + "' has no observed value at " +
                  format_timestamp(at, truth.frequency()) + " to score against");
      }
      const std::size_t pos = static_cast<std::size_t>(it - ts.timestamps.begin());
      acc.add(forecast.values[s][h], ts.target[pos]);
    }
    score.per_series[id] = acc.finish();
    pooled.merge(acc);
  }
  score.n_points = pooled.n;
  score.pooled = pooled.finish();
  return score;
}

/// Median over a copy; even-sized inputs average the two middle values.
inline double median(std::vector<double> values) {
  require(!values.empty(), ErrCode::LengthMismatch, "median of zero values");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace strata
