#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "strata/validation/metrics.hpp"
#include "strata/validation/splits.hpp"

namespace strata {

/// Averages the forecasts of per-fold models. Averaging happens here, in
/// original units after each member's own inverse transforms, because the
/// members' transformed spaces differ (each fold fits its own scalers).
class CvEnsemble {
public:
  explicit CvEnsemble(std::vector<Forecaster> members) : members_(std::move(members)) {
    require(!members_.empty(), ErrCode::ConstraintError, "ensemble needs at least one member");
  }

  const std::vector<Forecaster>& members() const { return members_; }

  Forecast forecast(const LongFrame& frame, std::optional<std::int64_t> origin = {}) const {
    Forecast mean = members_.front().forecast(frame, origin);
    for (std::size_t m = 1; m < members_.size(); ++m) {
      const Forecast f = members_[m].forecast(frame, origin);
      for (std::size_t s = 0; s < mean.n_series(); ++s) {
        require(f.values[s].size() == mean.values[s].size(), ErrCode::LengthMismatch,
                "ensemble members disagree on forecast length");
        for (std::size_t h = 0; h < mean.values[s].size(); ++h) {
          mean.values[s][h] += f.values[s][h];
        }
      }
    }
    const double scale = 1.0 / static_cast<double>(members_.size());
    for (auto& series : mean.values) {
      for (double& v : series) v *= scale;
    }
    return mean;
  }

private:
  std::vector<Forecaster> members_;
};

struct FoldOutcome {
  FoldSplit split;
  Forecast forecast;   // issued at the fold's train end
  ForecastScore score; // against the fold's validation range
};

struct CvResult {
  SplitPlan plan;
  std::vector<FoldOutcome> folds;
  CvEnsemble ensemble;
  Metrics validation;  // pooled over all folds' validation points
};

/// Fits one Forecaster per fold and scores it on its own validation range,
/// which doubles as the boosting early-stop monitor. Returns the per-fold
/// outcomes plus the fold-averaging ensemble.
inline CvResult cv_fit_ensemble(const LongFrame& frame, const PipelineConfig& pipeline_config,
                                const StrategySpec& strategy, const ModeSpec& mode,
                                const ModelSpec& model_spec, const SplitPlan& plan) {
  require(!plan.folds.empty(), ErrCode::ConstraintError, "split plan has no folds");
  require(plan.horizon == strategy.horizon, ErrCode::ConstraintError,
          "split plan horizon " + std::to_string(plan.horizon) +
              " differs from strategy horizon " + std::to_string(strategy.horizon));

  std::vector<Forecaster> members;
  std::vector<FoldOutcome> outcomes;
  MetricAccumulator pooled;

  for (const FoldSplit& split : plan.folds) {
    const LongFrame train = split.train_slice(frame);
    EarlyStopSplit es;
    es.context = &frame;
    es.train_end_ts = split.train_end_ts;
    es.valid_end_ts = split.valid_end_ts;
    Forecaster fc =
        Forecaster::fit(train, pipeline_config, strategy, mode, model_spec, &es);

    FoldOutcome outcome;
    outcome.split = split;
    outcome.forecast = fc.forecast(frame, split.train_end_ts);
    outcome.score = score_forecast(outcome.forecast, frame);
    pooled.abs_sum += outcome.score.pooled.mae * static_cast<double>(outcome.score.n_points);
    pooled.sq_sum += outcome.score.pooled.mse * static_cast<double>(outcome.score.n_points);
    pooled.n += outcome.score.n_points;

    outcomes.push_back(std::move(outcome));
    members.push_back(std::move(fc));
  }

  CvResult result{plan, std::move(outcomes), CvEnsemble(std::move(members)), pooled.finish()};
  return result;
}

}  // namespace strata
