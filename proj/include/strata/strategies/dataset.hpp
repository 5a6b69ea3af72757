#pragma once

#include <functional>
#include <vector>

#include "strata/data/validate.hpp"
#include "strata/strategies/spec.hpp"
#include "strata/transforms/pipeline.hpp"

namespace strata {

/// Training material for one strategy: one matrix for recursive / mimo /
/// flat_wide_mimo, one per segment for direct (segment k's targets are
/// offset by k * MH steps).
struct StrategyDataset {
  std::vector<FeatureMatrix> segments;
};

namespace detail {

inline MatrixBuildOptions dataset_options(const PipelineState& pipeline, const LongFrame& frame,
                                          const ModeSpec& mode) {
  MatrixBuildOptions opt;
  opt.history = pipeline.config().history();
  opt.freq = frame.frequency();
  if (const TransformSpec* dt = pipeline.config().find(TransformKind::DatetimeFeatures)) {
    opt.datetime_parts = dt->parts;
  }
  if (mode.mode == ForecastMode::Global) opt.id_encoder = pipeline.id_encoder();
  return opt;
}

inline FeatureMatrix build_one(const std::vector<PreparedSeries>& prepared,
                               const MatrixBuildOptions& opt, const ModeSpec& mode,
                               bool with_targets) {
  return mode.mode == ForecastMode::Multivariate
             ? build_channel_mixing_matrix(prepared, opt, with_targets)
             : build_pooled_matrix(prepared, opt, with_targets);
}

}  // namespace detail

/// Keeps only the rows the predicate accepts; schema and skip notes carry
/// over. Used to partition samples into train / early-stop-validation sets
/// by anchor time.
inline FeatureMatrix filter_rows(const FeatureMatrix& m,
                                 const std::function<bool(const RowAnchor&)>& keep) {
  FeatureMatrix out;
  out.schema = m.schema;
  out.skipped = m.skipped;
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t n = 0;
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    if (!keep(m.anchors[r])) continue;
    const auto xrow = m.X.row(r);
    xs.insert(xs.end(), xrow.begin(), xrow.end());
    if (m.Y.cols > 0) {
      const auto yrow = m.Y.row(r);
      ys.insert(ys.end(), yrow.begin(), yrow.end());
    }
    out.anchors.push_back(m.anchors[r]);
    ++n;
  }
  out.X = Matrix(n, m.X.cols, std::move(xs));
  out.Y = Matrix(n, m.Y.cols, std::move(ys));
  return out;
}

/// Shapes the frame into the strategy's training matrices under the given
/// mode, applying the window normalizer after shaping. `with_targets=false`
/// builds inference rows instead: one feature row per series (global) or one
/// joint row (multivariate) at the latest anchor, Y empty.
inline StrategyDataset build_strategy_dataset(const LongFrame& frame,
                                              const PipelineState& pipeline,
                                              const StrategySpec& strategy, const ModeSpec& mode,
                                              bool with_targets = true) {
  strategy.validate();
  if (mode.require_alignment && !check_alignment(frame)) {
    raise(ErrCode::NotAligned,
          "mode '" + mode.label + "' requires aligned series and the frame is not aligned");
  }

  const std::vector<PreparedSeries> prepared = pipeline.prepare_all(frame);
  MatrixBuildOptions opt = detail::dataset_options(pipeline, frame, mode);

  StrategyDataset dataset;
  switch (strategy.kind) {
    case StrategyKind::Recursive:
    case StrategyKind::Mimo: {
      opt.mh = strategy.kind == StrategyKind::Mimo ? strategy.horizon : strategy.model_horizon;
      dataset.segments.push_back(detail::build_one(prepared, opt, mode, with_targets));
      break;
    }
    case StrategyKind::Direct: {
      opt.mh = strategy.model_horizon;
      for (std::size_t k = 0; k < strategy.n_segments(); ++k) {
        opt.target_offset = k * strategy.model_horizon;
        dataset.segments.push_back(detail::build_one(prepared, opt, mode, with_targets));
      }
      break;
    }
    case StrategyKind::FlatWideMimo: {
      opt.mh = strategy.horizon;
      FeatureMatrix wide = detail::build_one(prepared, opt, mode, with_targets);
      dataset.segments.push_back(
          flatten_to_horizon_rows(wide, strategy.horizon, strategy.onehot_horizon));
      break;
    }
  }

  if (const TransformSpec* lkn = pipeline.config().find(TransformKind::LastKnownNormalizer)) {
    for (auto& segment : dataset.segments) apply_last_known(segment, *lkn);
  }
  return dataset;
}

}  // namespace strata
