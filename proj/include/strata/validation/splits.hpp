#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"

namespace strata {

enum class CvScheme { Expanding, Rolling };

inline const char* to_string(CvScheme s) {
  return s == CvScheme::Expanding ? "expanding" : "rolling";
}

/// One rolling-origin fold. Training covers timestamps in
/// [train_start_ts, train_end_ts] (start unset = from the beginning of the
/// data); validation covers the next `horizon` grid steps,
/// (train_end_ts, valid_end_ts].
struct FoldSplit {
  std::optional<std::int64_t> train_start_ts;
  std::int64_t train_end_ts = 0;
  std::int64_t valid_end_ts = 0;

  LongFrame train_slice(const LongFrame& frame) const {
    LongFrame cut = frame.slice_until(train_end_ts);
    if (train_start_ts.has_value()) cut = cut.slice_from(*train_start_ts);
    return cut;
  }
};

struct SplitPlan {
  CvScheme scheme = CvScheme::Expanding;
  std::size_t n_folds = 0;
  std::size_t horizon = 0;
  std::size_t window = 0;  // training points per fold; rolling scheme only
  std::vector<FoldSplit> folds;
};

/// Rolling-origin splits counted back from the end of the frame: fold k
/// (0-based) trains up to T - (n_folds - k) * H points from the end and
/// validates on the following H. Expanding folds grow from the start of the
/// data; rolling folds keep a fixed `window` of training points.
inline SplitPlan make_cv_splits(const LongFrame& frame, CvScheme scheme, std::size_t n_folds,
                                std::size_t horizon, std::size_t window = 0) {
  require(n_folds >= 1, ErrCode::ConstraintError, "need at least 1 fold");
  require(horizon >= 1, ErrCode::ConstraintError, "horizon must be >= 1");
  require(frame.n_series() > 0, ErrCode::EmptyDataset, "cannot split an empty frame");
  if (scheme == CvScheme::Rolling) {
    require(window >= 1, ErrCode::ConstraintError, "rolling scheme needs a window size");
  }

  const std::int64_t step = frame.frequency().step;
  std::int64_t last_ts = frame.series(0).timestamps.back();
  for (const auto& s : frame.all_series()) {
    require(s.length() > 0, ErrCode::EmptyDataset, "series '" + s.id + "' is empty");
    last_ts = std::max(last_ts, s.timestamps.back());
  }

  SplitPlan plan;
  plan.scheme = scheme;
  plan.n_folds = n_folds;
  plan.horizon = horizon;
  plan.window = scheme == CvScheme::Rolling ? window : 0;

  const std::int64_t h_span = static_cast<std::int64_t>(horizon) * step;
  for (std::size_t k = 0; k < n_folds; ++k) {
    FoldSplit fold;
    fold.train_end_ts = last_ts - static_cast<std::int64_t>(n_folds - k) * h_span;
    fold.valid_end_ts = fold.train_end_ts + h_span;
    if (scheme == CvScheme::Rolling) {
      fold.train_start_ts = fold.train_end_ts - static_cast<std::int64_t>(window - 1) * step;
    }
    plan.folds.push_back(fold);
  }

  // Every series must reach the earliest fold with at least one training
  // point, and rolling windows must stay inside the observed range.
  const FoldSplit& first = plan.folds.front();
  for (const auto& s : frame.all_series()) {
    if (s.timestamps.front() > first.train_end_ts) {
      raise(ErrCode::TooShortForFolds,
            "series '" + s.id + "' has no data before the first fold's train end " +
                format_timestamp(first.train_end_ts, frame.frequency()) + "; need length > " +
                std::to_string(n_folds * horizon) + " points");
    }
    if (first.train_start_ts.has_value() && s.timestamps.front() > *first.train_start_ts) {
      raise(ErrCode::TooShortForFolds,
            "series '" + s.id + "' starts after the first rolling window at " +
                format_timestamp(*first.train_start_ts, frame.frequency()) +
                "; shrink the window or the fold count");
    }
  }
  return plan;
}

}  // namespace strata
