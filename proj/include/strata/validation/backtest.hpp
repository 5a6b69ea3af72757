#pragma once

#include <utility>
#include <vector>

#include "strata/validation/metrics.hpp"

namespace strata {

struct BacktestWindow {
  std::int64_t origin = 0;
  Forecast forecast;
  ForecastScore score;
};

struct BacktestResult {
  std::vector<BacktestWindow> windows;
  Metrics aggregate;          // pooled over every window's points
  std::size_t n_points = 0;
};

/// Rolling-origin evaluation: refits from scratch at each of `n_windows`
/// origins (spaced `stride` steps, the last one H steps from the end),
/// forecasts H steps, and scores against the observed values.
inline BacktestResult backtest(const LongFrame& frame, const PipelineConfig& pipeline_config,
                               const StrategySpec& strategy, const ModeSpec& mode,
                               const ModelSpec& model_spec, std::size_t n_windows,
                               std::size_t stride) {
  require(n_windows >= 1, ErrCode::ConstraintError, "need at least 1 backtest window");
  require(stride >= 1, ErrCode::ConstraintError, "stride must be >= 1");
  require(frame.n_series() > 0, ErrCode::EmptyDataset, "cannot backtest an empty frame");

  const std::int64_t step = frame.frequency().step;
  const std::int64_t h_span = static_cast<std::int64_t>(strategy.horizon) * step;
  std::int64_t last_ts = frame.series(0).timestamps.back();
  for (const auto& s : frame.all_series()) last_ts = std::max(last_ts, s.timestamps.back());

  const std::int64_t earliest =
      last_ts - h_span - static_cast<std::int64_t>((n_windows - 1) * stride) * step;
  for (const auto& s : frame.all_series()) {
    if (s.length() == 0 || s.timestamps.front() > earliest) {
      raise(ErrCode::TooShortForBacktest,
            "series '" + s.id + "' has no data before the earliest origin " +
                format_timestamp(earliest, frame.frequency()) + "; reduce n_windows or stride");
    }
  }

  BacktestResult result;
  MetricAccumulator pooled;
  for (std::size_t w = 0; w < n_windows; ++w) {
    BacktestWindow window;
    window.origin = earliest + static_cast<std::int64_t>(w * stride) * step;
    const LongFrame train = frame.slice_until(window.origin);
    const Forecaster fc = Forecaster::fit(train, pipeline_config, strategy, mode, model_spec);
    window.forecast = fc.forecast(frame, window.origin);
    window.score = score_forecast(window.forecast, frame);
    pooled.abs_sum += window.score.pooled.mae * static_cast<double>(window.score.n_points);
    pooled.sq_sum += window.score.pooled.mse * static_cast<double>(window.score.n_points);
    pooled.n += window.score.n_points;
    result.windows.push_back(std::move(window));
  }
  result.aggregate = pooled.finish();
  result.n_points = pooled.n;
  return result;
}

}  // namespace strata
