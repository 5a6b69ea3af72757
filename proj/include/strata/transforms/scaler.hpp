#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strata/data/frame.hpp"

namespace strata {

/// Fitted standardization parameters for one series (or the pooled fit).
struct ScalerParams {
  double mean = 0.0;
  double std = 1.0;
};

/// Population mean/std. A std below 1e-12 (constant series) clamps to 1 so
/// that scaling stays total and the inverse stays exact.
inline ScalerParams fit_scaler(std::span<const double> values) {
  ScalerParams p;
  if (values.empty()) return p;
  double sum = 0.0;
  for (double v : values) sum += v;
  p.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - p.mean) * (v - p.mean);
  p.std = std::sqrt(sq / static_cast<double>(values.size()));
  if (p.std < 1e-12) p.std = 1.0;
  return p;
}

inline double scale_value(const ScalerParams& p, double x) { return (x - p.mean) / p.std; }
inline double unscale_value(const ScalerParams& p, double z) { return z * p.std + p.mean; }

inline std::vector<double> scale_values(const ScalerParams& p, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(scale_value(p, x));
  return out;
}

inline std::vector<double> unscale_values(const ScalerParams& p, std::span<const double> zs) {
  std::vector<double> out;
  out.reserve(zs.size());
  for (double z : zs) out.push_back(unscale_value(p, z));
  return out;
}

/// Frame-level convenience: standardize every target column. Per-series
/// statistics by default; `pooled` fits one mean/std across all series.
/// Returned map holds one entry per series id (identical entries when pooled).
inline std::pair<LongFrame, std::map<std::string, ScalerParams>> standard_scale(
    const LongFrame& frame, bool pooled = false) {
  std::map<std::string, ScalerParams> params;
  if (pooled) {
    std::vector<double> all;
    all.reserve(frame.total_rows());
    for (const auto& s : frame.all_series()) all.insert(all.end(), s.target.begin(), s.target.end());
    const ScalerParams p = fit_scaler(all);
    for (const auto& s : frame.all_series()) params[s.id] = p;
  } else {
    for (const auto& s : frame.all_series()) params[s.id] = fit_scaler(s.target);
  }

  std::vector<Series> scaled;
  scaled.reserve(frame.n_series());
  for (const auto& s : frame.all_series()) {
    Series out = s;
    out.target = scale_values(params.at(s.id), s.target);
    scaled.push_back(std::move(out));
  }
  return {LongFrame(frame.frequency(), frame.exog_columns(), std::move(scaled)), std::move(params)};
}

}  // namespace strata
