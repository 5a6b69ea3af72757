#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"
#include "strata/transforms/difference.hpp"
#include "strata/transforms/id_features.hpp"
#include "strata/transforms/lag_matrix.hpp"
#include "strata/transforms/last_known.hpp"
#include "strata/transforms/scaler.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

/// A pipeline after fitting: frozen per-series (or pooled) scaler statistics
/// and differencing anchors for the feature chain and the target chain.
/// Fit once on the training range; afterwards every apply/invert call is
/// pure, uses only frozen parameters, and is safe to run concurrently.
class PipelineState {
public:
  PipelineState() = default;

  static PipelineState fit(const PipelineConfig& config, const LongFrame& train) {
    PipelineState state;
    state.config_ = config;
    state.feature_steps_ = state.fit_chain(config.series_steps(false), train);
    state.target_steps_ = state.fit_chain(config.series_steps(true), train);
    if (const TransformSpec* id_spec = config.find(TransformKind::IdFeatures)) {
      state.id_encoder_ = IdEncoder::fit(train, id_spec->encoding);
    }
    return state;
  }

  const PipelineConfig& config() const { return config_; }

  /// Fitted id-feature encoder, or nullptr when the pipeline has none.
  const IdEncoder* id_encoder() const {
    return id_encoder_.has_value() ? &*id_encoder_ : nullptr;
  }

  bool lkn_on_targets() const {
    const TransformSpec* lkn = config_.find(TransformKind::LastKnownNormalizer);
    return lkn != nullptr && lkn->apply_to != ApplyTo::Features;
  }

  /// Applies the frozen feature or target chain to a value sequence belonging
  /// to `series_id`. Entries below the returned valid_from are NaN.
  SeriesView transform_values(const std::string& series_id, std::span<const double> values,
                              bool target_view) const {
    return apply_chain(target_view ? target_steps_ : feature_steps_, series_id, values);
  }

  /// Both processed views plus raw exogenous columns for one series.
  PreparedSeries prepare(const Series& s, const std::vector<ExogColumn>& exog_columns) const {
    PreparedSeries ps;
    ps.id = s.id;
    ps.timestamps = s.timestamps;
    ps.features = transform_values(s.id, s.target, false);
    ps.target = transform_values(s.id, s.target, true);
    for (const auto& col : exog_columns) ps.exog_names.push_back(col.name);
    ps.exog = s.exog;
    return ps;
  }

  std::vector<PreparedSeries> prepare_all(const LongFrame& frame) const {
    std::vector<PreparedSeries> out;
    out.reserve(frame.n_series());
    for (const auto& s : frame.all_series()) out.push_back(prepare(s, frame.exog_columns()));
    return out;
  }

  /// Maps model outputs for one series/block back to original units.
  /// `history_original` holds original-space values up to and including the
  /// row's anchor point; `preds` are consecutive post-anchor steps in the
  /// model's target space. `lkn_anchor` is the row's stored last-known value,
  /// required exactly when the pipeline window-normalizes targets.
  std::vector<double> invert_target_predictions(const std::string& series_id,
                                                std::span<const double> history_original,
                                                std::span<const double> preds,
                                                std::optional<double> lkn_anchor = {}) const {
    std::vector<double> out(preds.begin(), preds.end());

    const TransformSpec* lkn = config_.find(TransformKind::LastKnownNormalizer);
    if (lkn != nullptr && lkn->apply_to != ApplyTo::Features) {
      if (!lkn_anchor.has_value()) {
        raise(ErrCode::MissingAnchor,
              "inverting series '" + series_id + "' needs the row's last-known value");
      }
      for (double& v : out) v = last_known_invert(v, *lkn_anchor, lkn->mode);
    }

    // Recompute the target chain forward over the history to learn, for each
    // step, the last value in that step's input space; differencing inverts
    // cumulatively from it.
    std::vector<double> stage_last(target_steps_.size(), 0.0);
    SeriesView view;
    view.values.assign(history_original.begin(), history_original.end());
    for (std::size_t i = 0; i < target_steps_.size(); ++i) {
      if (view.valid_from >= view.values.size()) {
        raise(ErrCode::InsufficientHistory,
              "series '" + series_id + "': history of " +
                  std::to_string(history_original.size()) +
                  " points is too short to invert the pipeline");
      }
      stage_last[i] = view.values.back();
      apply_step(target_steps_[i], series_id, view);
    }

    for (std::size_t i = target_steps_.size(); i-- > 0;) {
      const FittedStep& step = target_steps_[i];
      if (step.spec.kind == TransformKind::StandardScaler) {
        const ScalerParams& p = scaler_for(step, series_id);
        for (double& v : out) v = unscale_value(p, v);
      } else {
        out = difference_invert(stage_last[i], out, step.spec.mode);
      }
    }
    return out;
  }

  /// Stored first-value anchors of differencing steps (target chain),
  /// exposed for full-series reconstruction and tests.
  std::map<std::string, double> difference_anchors(std::size_t step_index) const {
    require(step_index < target_steps_.size(), ErrCode::ConstraintError,
            "no fitted target step " + std::to_string(step_index));
    return target_steps_[step_index].dn_anchors;
  }

private:
  struct FittedStep {
    TransformSpec spec;
    std::map<std::string, ScalerParams> scaler;  // key "*" when pooled
    std::map<std::string, double> dn_anchors;    // first valid input value
  };

  const ScalerParams& scaler_for(const FittedStep& step, const std::string& series_id) const {
    const std::string key = step.spec.pooled ? "*" : series_id;
    auto it = step.scaler.find(key);
    if (it == step.scaler.end()) {
      raise(ErrCode::UnknownSeries,
            "no fitted scaler statistics for series '" + series_id + "'");
    }
    return it->second;
  }

  static std::span<const double> valid_part(const SeriesView& view) {
    if (view.valid_from >= view.values.size()) return {};
    return {view.values.data() + view.valid_from, view.values.size() - view.valid_from};
  }

  void apply_step(const FittedStep& step, const std::string& series_id, SeriesView& view) const {
    if (step.spec.kind == TransformKind::StandardScaler) {
      const ScalerParams& p = scaler_for(step, series_id);
      for (std::size_t i = view.valid_from; i < view.values.size(); ++i) {
        view.values[i] = scale_value(p, view.values[i]);
      }
      return;
    }
    // Differencing, in place from the tail so each cell reads its
    // untransformed left neighbour.
    for (std::size_t i = view.values.size(); i-- > view.valid_from + 1;) {
      if (step.spec.mode == NormalizerMode::Delta) {
        view.values[i] = view.values[i] - view.values[i - 1];
      } else {
        if (view.values[i - 1] == 0.0) {
          raise(ErrCode::ZeroDivision, "series '" + series_id +
                                           "': ratio difference hit a zero value at position " +
                                           std::to_string(i - 1));
        }
        view.values[i] = view.values[i] / view.values[i - 1];
      }
    }
    if (view.valid_from < view.values.size()) {
      view.values[view.valid_from] = std::numeric_limits<double>::quiet_NaN();
    }
    view.valid_from = std::min(view.valid_from + 1, view.values.size());
  }

  SeriesView apply_chain(const std::vector<FittedStep>& steps, const std::string& series_id,
                         std::span<const double> values) const {
    SeriesView view;
    view.values.assign(values.begin(), values.end());
    for (const auto& step : steps) apply_step(step, series_id, view);
    return view;
  }

  std::vector<FittedStep> fit_chain(const std::vector<TransformSpec>& specs,
                                    const LongFrame& train) {
    std::vector<SeriesView> views;
    views.reserve(train.n_series());
    for (const auto& s : train.all_series()) {
      SeriesView v;
      v.values = s.target;
      views.push_back(std::move(v));
    }

    std::vector<FittedStep> steps;
    for (const auto& spec : specs) {
      FittedStep step;
      step.spec = spec;
      if (spec.kind == TransformKind::StandardScaler) {
        if (spec.pooled) {
          std::vector<double> all;
          for (const auto& v : views) {
            const auto part = valid_part(v);
            all.insert(all.end(), part.begin(), part.end());
          }
          step.scaler["*"] = fit_scaler(all);
        } else {
          for (std::size_t i = 0; i < train.n_series(); ++i) {
            step.scaler[train.series(i).id] = fit_scaler(valid_part(views[i]));
          }
        }
      } else {
        for (std::size_t i = 0; i < train.n_series(); ++i) {
          const Series& s = train.series(i);
          require(valid_part(views[i]).size() >= 2, ErrCode::SeriesTooShort,
                  "series '" + s.id + "' needs >= 2 points to difference");
          step.dn_anchors[s.id] = views[i].values[views[i].valid_from];
        }
      }
      for (std::size_t i = 0; i < train.n_series(); ++i) {
        apply_step(step, train.series(i).id, views[i]);
      }
      steps.push_back(std::move(step));
    }
    return steps;
  }

  PipelineConfig config_;
  std::vector<FittedStep> feature_steps_;
  std::vector<FittedStep> target_steps_;
  std::optional<IdEncoder> id_encoder_;
};

}  // namespace strata
