#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "strata/core/csv.hpp"
#include "strata/models/io.hpp"
#include "strata/strategies/dataset.hpp"

namespace strata {

/// H-step forecasts for every series, in original data units.
struct Forecast {
  FrequencySpec freq;
  std::vector<std::string> series_ids;
  std::vector<std::vector<std::int64_t>> timestamps;  // [series][h]
  std::vector<std::vector<double>> values;            // [series][h]

  std::size_t n_series() const { return series_ids.size(); }

  const std::vector<double>& series_values(const std::string& id) const {
    for (std::size_t i = 0; i < series_ids.size(); ++i) {
      if (series_ids[i] == id) return values[i];
    }
    raise(ErrCode::UnknownSeries, "no forecast for series '" + id + "'");
  }

  /// Long-format CSV: series_id, timestamp, prediction.
  void write_csv(const std::string& path) const {
    csv::Writer writer(path);
    writer.write_row({"series_id", "timestamp", "prediction"});
    char buf[32];
    for (std::size_t s = 0; s < series_ids.size(); ++s) {
      for (std::size_t h = 0; h < values[s].size(); ++h) {
        std::snprintf(buf, sizeof(buf), "%.17g", values[s][h]);
        writer.write_row({series_ids[s], format_timestamp(timestamps[s][h], freq), buf});
      }
    }
  }
};

/// Time boundaries for boosting early stopping: monitor rows are windows in
/// `context` whose last target falls in (train_end_ts, valid_end_ts].
struct EarlyStopSplit {
  const LongFrame* context = nullptr;
  std::int64_t train_end_ts = 0;
  std::int64_t valid_end_ts = 0;
};

/// A fitted strategy: pipeline state, one model per segment, and the frozen
/// feature layout. Immutable after fit; forecast calls are pure.
class Forecaster {
public:
  static Forecaster fit(const LongFrame& train, const PipelineConfig& pipeline_config,
                        const StrategySpec& strategy, const ModeSpec& mode,
                        const ModelSpec& model_spec, const EarlyStopSplit* early_stop = nullptr) {
    strategy.validate();
    model_spec.validate();

    Forecaster fc;
    fc.strategy_ = strategy;
    fc.mode_ = mode;
    fc.model_spec_ = model_spec;
    fc.pipeline_ = PipelineState::fit(pipeline_config, train);

    StrategyDataset dataset = build_strategy_dataset(train, fc.pipeline_, strategy, mode);

    const bool wants_early_stop =
        model_spec.kind == ModelKind::Gbdt && model_spec.early_stopping_rounds > 0;
    std::vector<FeatureMatrix> monitor;
    if (wants_early_stop) {
      if (early_stop != nullptr) {
        monitor = fc.build_monitor_rows(*early_stop);
      } else {
        // No boundary supplied: hold out each series' last 20% of windows.
        dataset = fc.split_off_monitor(std::move(dataset), train, monitor);
      }
    }

    for (std::size_t k = 0; k < dataset.segments.size(); ++k) {
      const FeatureMatrix& seg = dataset.segments[k];
      const FeatureMatrix* mon = k < monitor.size() && monitor[k].n_rows() > 0 ? &monitor[k]
                                                                               : nullptr;
      fc.models_.push_back(fit_model(model_spec, seg.schema, seg.X, seg.Y,
                                     mon != nullptr ? &mon->X : nullptr,
                                     mon != nullptr ? &mon->Y : nullptr));
      fc.schemas_.push_back(seg.schema);
    }
    return fc;
  }

  const StrategySpec& strategy() const { return strategy_; }
  const ModeSpec& mode() const { return mode_; }
  const ModelSpec& model_spec() const { return model_spec_; }
  const PipelineState& pipeline() const { return pipeline_; }
  const std::vector<ModelPtr>& models() const { return models_; }
  const FeatureSchema& schema(std::size_t segment = 0) const { return schemas_[segment]; }

  /// Forecasts H steps past `origin` (default: each series' last point).
  /// Target history is cut at the origin; exogenous columns stay visible past
  /// it, because future covariate values are inputs, not outcomes.
  Forecast forecast(const LongFrame& frame, std::optional<std::int64_t> origin = {}) const {
    const LongFrame history =
        origin.has_value() ? frame.slice_until(*origin) : frame.slice_until(last_timestamp(frame));
    for (const auto& s : history.all_series()) {
      if (s.length() == 0) {
        raise(ErrCode::InsufficientHistory, "series '" + s.id + "' has no data at the origin");
      }
    }
    return strategy_.kind == StrategyKind::Recursive ? forecast_recursive(history, frame)
                                                     : forecast_batch(history);
  }

private:
  static std::int64_t last_timestamp(const LongFrame& frame) {
    require(frame.n_series() > 0, ErrCode::EmptyDataset, "cannot forecast an empty frame");
    std::int64_t last = frame.series(0).timestamps.back();
    for (const auto& s : frame.all_series()) last = std::max(last, s.timestamps.back());
    return last;
  }

  Forecast empty_forecast(const LongFrame& history) const {
    Forecast out;
    out.freq = history.frequency();
    for (const auto& s : history.all_series()) {
      out.series_ids.push_back(s.id);
      std::vector<std::int64_t> ts;
      for (std::size_t h = 1; h <= strategy_.horizon; ++h) {
        ts.push_back(s.timestamps.back() + static_cast<std::int64_t>(h) * out.freq.step);
      }
      out.timestamps.push_back(std::move(ts));
      out.values.emplace_back();
    }
    return out;
  }

  /// Transformed-space model outputs for one block, laid out per layout kind.
  /// Batch paths collect H consecutive steps per series, then invert once.
  Forecast forecast_batch(const LongFrame& history) const {
    const StrategyDataset inference =
        build_strategy_dataset(history, pipeline_, strategy_, mode_, false);
    const FeatureMatrix& rows = inference.segments.front();
    check_layout(rows.schema);

    const std::size_t H = strategy_.horizon;
    const std::size_t blocks = rows.schema.block_ids.size();
    const bool mixing = mode_.mode == ForecastMode::Multivariate;

    // predictions[base_row][block][h], transformed space.
    const std::size_t base_rows = mixing ? 1 : history.n_series();
    std::vector<std::vector<std::vector<double>>> predictions(
        base_rows, std::vector<std::vector<double>>(mixing ? blocks : 1, std::vector<double>(H)));

    switch (strategy_.kind) {
      case StrategyKind::Mimo: {
        const Matrix P = models_[0]->predict(rows.X);
        for (std::size_t r = 0; r < P.rows; ++r) {
          for (std::size_t b = 0; b < (mixing ? blocks : 1); ++b) {
            for (std::size_t h = 0; h < H; ++h) predictions[r][b][h] = P.at(r, b * H + h);
          }
        }
        break;
      }
      case StrategyKind::Direct: {
        const std::size_t mh = strategy_.model_horizon;
        for (std::size_t k = 0; k < models_.size(); ++k) {
          const Matrix P = models_[k]->predict(rows.X);
          for (std::size_t r = 0; r < P.rows; ++r) {
            for (std::size_t b = 0; b < (mixing ? blocks : 1); ++b) {
              for (std::size_t j = 0; j < mh; ++j) {
                predictions[r][b][k * mh + j] = P.at(r, b * mh + j);
              }
            }
          }
        }
        break;
      }
      case StrategyKind::FlatWideMimo: {
        const Matrix P = models_[0]->predict(rows.X);  // base_rows*H rows, `blocks` columns
        for (std::size_t r = 0; r < base_rows; ++r) {
          for (std::size_t b = 0; b < (mixing ? blocks : 1); ++b) {
            for (std::size_t h = 0; h < H; ++h) predictions[r][b][h] = P.at(r * H + h, b);
          }
        }
        break;
      }
      case StrategyKind::Recursive:
        raise(ErrCode::ConstraintError, "recursive strategy has no batch path");
    }

    Forecast out = empty_forecast(history);
    // FlatWideMimo duplicates each base row's anchor H times.
    const std::size_t anchor_stride = strategy_.kind == StrategyKind::FlatWideMimo ? H : 1;
    for (std::size_t r = 0; r < base_rows; ++r) {
      const RowAnchor& anchor = rows.anchors[r * anchor_stride];
      for (std::size_t b = 0; b < (mixing ? blocks : 1); ++b) {
        const std::string& id = mixing ? rows.schema.block_ids[b] : anchor.series_id;
        const auto idx = history.find(id);
        require(idx.has_value(), ErrCode::UnknownSeries, "series '" + id + "' missing");
        const Series& s = history.series(*idx);
        out.values[*idx] = pipeline_.invert_target_predictions(
            id, s.target, predictions[r][b], anchor.last_known[mixing ? b : 0]);
      }
    }
    return out;
  }

  Forecast forecast_recursive(const LongFrame& history, const LongFrame& full_frame) const {
    const std::size_t H = strategy_.horizon;
    const std::size_t mh = strategy_.model_horizon;
    const std::size_t iterations = (H + mh - 1) / mh;
    const std::int64_t step = history.frequency().step;
    const bool mixing = mode_.mode == ForecastMode::Multivariate;

    // Working copies per series, kept in original units and extended with
    // inverted predictions after each iteration; the views are recomputed
    // from scratch each time so every transform sees the full history.
    std::vector<Series> work = history.all_series();
    Forecast out = empty_forecast(history);

    std::size_t done = 0;
    for (std::size_t iter = 0; iter < iterations; ++iter) {
      const LongFrame frame(history.frequency(), history.exog_columns(), work);
      const StrategyDataset ds = build_strategy_dataset(frame, pipeline_, strategy_, mode_, false);
      const FeatureMatrix& rows = ds.segments.front();
      check_layout(rows.schema);

      const Matrix P = models_[0]->predict(rows.X);
      const std::size_t take = std::min(mh, H - done);
      const std::size_t n_blocks = mixing ? rows.schema.block_ids.size() : 1;

      for (std::size_t r = 0; r < P.rows; ++r) {
        const RowAnchor& anchor = rows.anchors[r];
        for (std::size_t b = 0; b < n_blocks; ++b) {
          const std::string& id = mixing ? rows.schema.block_ids[b] : anchor.series_id;
          const auto sidx = history.find(id);
          require(sidx.has_value(), ErrCode::UnknownSeries, "series '" + id + "' missing");
          Series& ws = work[*sidx];

          std::vector<double> block(mh);
          for (std::size_t j = 0; j < mh; ++j) block[j] = P.at(r, b * mh + j);
          const std::vector<double> inverted = pipeline_.invert_target_predictions(
              id, ws.target, block, anchor.last_known[b]);

          for (std::size_t j = 0; j < take; ++j) {
            const std::int64_t ts = ws.timestamps.back() + step;
            ws.timestamps.push_back(ts);
            ws.target.push_back(inverted[j]);
            out.values[*sidx].push_back(inverted[j]);
            extend_exog(ws, full_frame, ts);
          }
        }
      }
      done += take;
    }
    return out;
  }

  /// Future covariate lookup for the recursive loop: exogenous values at
  /// predicted timestamps must exist in the caller's frame.
  static void extend_exog(Series& w, const LongFrame& full_frame, std::int64_t ts) {
    if (w.exog.empty()) return;
    const auto idx = full_frame.find(w.id);
    require(idx.has_value(), ErrCode::UnknownSeries, "series '" + w.id + "' missing");
    const Series& s = full_frame.series(*idx);
    const auto it = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), ts);
    if (it == s.timestamps.end() || *it != ts) {
      raise(ErrCode::MissingCovariates,
            "series '" + w.id + "' has no covariate values at " +
                format_timestamp(ts, full_frame.frequency()) +
                "; recursive inference needs future exogenous rows in the frame");
    }
    const std::size_t pos = static_cast<std::size_t>(it - s.timestamps.begin());
    for (std::size_t c = 0; c < w.exog.size(); ++c) w.exog[c].push_back(s.exog[c][pos]);
  }

  void check_layout(const FeatureSchema& schema) const {
    require(schema.columns == schemas_.front().columns, ErrCode::DimensionMismatch,
            "inference feature layout differs from the layout frozen at fit");
  }

  /// Monitor matrices for early stopping from an explicit time split: all
  /// windows in the context frame whose last target lies past train_end.
  std::vector<FeatureMatrix> build_monitor_rows(const EarlyStopSplit& split) const {
    require(split.context != nullptr, ErrCode::ConstraintError,
            "early-stop split needs a context frame");
    const LongFrame sliced = split.context->slice_until(split.valid_end_ts);
    StrategyDataset ds = build_strategy_dataset(sliced, pipeline_, strategy_, mode_);
    std::vector<FeatureMatrix> monitor;
    const std::int64_t step = sliced.frequency().step;
    for (std::size_t k = 0; k < ds.segments.size(); ++k) {
      const std::int64_t span = last_target_span(k) * step;
      monitor.push_back(filter_rows(ds.segments[k], [&](const RowAnchor& a) {
        return a.anchor_ts + span > split.train_end_ts;
      }));
    }
    return monitor;
  }

  /// No explicit split: partition each segment's own rows so that windows
  /// ending in the last fifth of each series' observed span are monitored,
  /// not trained on.
  StrategyDataset split_off_monitor(StrategyDataset dataset, const LongFrame& train,
                                    std::vector<FeatureMatrix>& monitor) const {
    std::map<std::string, std::int64_t> boundary;
    std::int64_t shared_boundary = 0;
    bool first = true;
    for (const auto& s : train.all_series()) {
      const std::size_t cut = (s.length() * 4) / 5;
      const std::int64_t b = s.timestamps[std::max<std::size_t>(cut, 1) - 1];
      boundary[s.id] = b;
      shared_boundary = first ? b : std::min(shared_boundary, b);
      first = false;
    }
    const std::int64_t step = train.frequency().step;
    StrategyDataset kept;
    for (std::size_t k = 0; k < dataset.segments.size(); ++k) {
      const std::int64_t span = last_target_span(k) * step;
      auto is_train = [&](const RowAnchor& a) {
        const std::int64_t b = a.series_id.empty() ? shared_boundary : boundary.at(a.series_id);
        return a.anchor_ts + span <= b;
      };
      FeatureMatrix train_rows = filter_rows(dataset.segments[k], is_train);
      FeatureMatrix monitor_rows =
          filter_rows(dataset.segments[k], [&](const RowAnchor& a) { return !is_train(a); });
      if (train_rows.n_rows() == 0 || monitor_rows.n_rows() == 0) {
        // Degenerate split: train on everything, disable the monitor.
        kept.segments.push_back(std::move(dataset.segments[k]));
        monitor.emplace_back();
      } else {
        kept.segments.push_back(std::move(train_rows));
        monitor.push_back(std::move(monitor_rows));
      }
    }
    return kept;
  }

  /// Steps from a row's anchor to its last target for segment k. FlatWideMimo
  /// rows carry per-row horizon indices, so the base window's full span is
  /// used for all of them.
  std::int64_t last_target_span(std::size_t segment) const {
    if (strategy_.kind == StrategyKind::Direct) {
      return static_cast<std::int64_t>((segment + 1) * strategy_.model_horizon);
    }
    if (strategy_.kind == StrategyKind::FlatWideMimo) {
      return static_cast<std::int64_t>(strategy_.horizon);
    }
    return static_cast<std::int64_t>(strategy_.model_horizon);
  }

  StrategySpec strategy_;
  ModeSpec mode_;
  ModelSpec model_spec_;
  PipelineState pipeline_;
  std::vector<ModelPtr> models_;
  std::vector<FeatureSchema> schemas_;
};

/// Free-function form mirroring the fit entry point.
inline Forecaster fit_forecaster(const LongFrame& train, const PipelineConfig& pipeline_config,
                                 const StrategySpec& strategy, const ModeSpec& mode,
                                 const ModelSpec& model_spec,
                                 const EarlyStopSplit* early_stop = nullptr) {
  return Forecaster::fit(train, pipeline_config, strategy, mode, model_spec, early_stop);
}

}  // namespace strata
