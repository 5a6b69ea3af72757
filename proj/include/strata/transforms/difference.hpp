#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strata/data/frame.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

/// Consecutive-difference transform of one value sequence. Output has one
/// fewer element: entry i is x[i+1] - x[i] (delta) or x[i+1] / x[i] (ratio).
/// `context` prefixes error messages with the series being processed.
inline std::vector<double> difference_forward(std::span<const double> x, NormalizerMode mode,
                                              const std::string& context = "") {
  std::vector<double> out;
  if (x.size() <= 1) return out;
  out.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (mode == NormalizerMode::Delta) {
      out.push_back(x[i] - x[i - 1]);
    } else {
      if (x[i - 1] == 0.0) {
        raise(ErrCode::ZeroDivision,
              context + "ratio difference hit a zero value at position " + std::to_string(i - 1));
      }
      out.push_back(x[i] / x[i - 1]);
    }
  }
  return out;
}

/// Reconstructs the original continuation from differenced values: `anchor`
/// is the untransformed value immediately before d[0]. Telescoping sum for
/// delta, cumulative product for ratio.
inline std::vector<double> difference_invert(double anchor, std::span<const double> d,
                                             NormalizerMode mode) {
  std::vector<double> out;
  out.reserve(d.size());
  double running = anchor;
  for (double v : d) {
    running = mode == NormalizerMode::Delta ? running + v : running * v;
    out.push_back(running);
  }
  return out;
}

/// Frame-level convenience: difference every target column, dropping the
/// first point of each series (timestamps shift accordingly). The returned
/// anchor map stores each series' first value for full reconstruction.
inline std::pair<LongFrame, std::map<std::string, double>> difference_normalize(
    const LongFrame& frame, NormalizerMode mode) {
  std::map<std::string, double> anchors;
  std::vector<Series> out_series;
  out_series.reserve(frame.n_series());
  for (const auto& s : frame.all_series()) {
    require(s.length() >= 2, ErrCode::SeriesTooShort,
            "series '" + s.id + "' needs >= 2 points to difference");
    anchors[s.id] = s.target.front();
    Series out;
    out.id = s.id;
    out.timestamps.assign(s.timestamps.begin() + 1, s.timestamps.end());
    out.target = difference_forward(s.target, mode, "series '" + s.id + "': ");
    for (const auto& col : s.exog) out.exog.emplace_back(col.begin() + 1, col.end());
    out_series.push_back(std::move(out));
  }
  return {LongFrame(frame.frequency(), frame.exog_columns(), std::move(out_series)),
          std::move(anchors)};
}

}  // namespace strata
