#pragma once

#include <cstddef>
#include <string>

#include "strata/core/error.hpp"

namespace strata {

enum class StrategyKind { Recursive, Direct, Mimo, FlatWideMimo };

inline const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Recursive: return "recursive";
    case StrategyKind::Direct: return "direct";
    case StrategyKind::Mimo: return "mimo";
    case StrategyKind::FlatWideMimo: return "flat_wide_mimo";
  }
  return "?";
}

/// How the horizon H is covered by model calls of width MH:
///  - recursive: one model, ceil(H/MH) iterations, final block truncated
///    (MH > 1 is the Rec-MIMO variant);
///  - direct: H/MH independent models, segment k owning steps kMH+1..(k+1)MH;
///  - mimo: one model, one call, MH == H;
///  - flat_wide_mimo: the MIMO set flattened to scalar targets with the
///    horizon index as a feature (raw 1..H by default, one-hot optionally).
struct StrategySpec {
  StrategyKind kind = StrategyKind::Recursive;
  std::size_t horizon = 24;
  std::size_t model_horizon = 1;
  bool onehot_horizon = false;  // flat_wide_mimo only

  void validate() const {
    require(horizon >= 1, ErrCode::InvalidStrategySpec, "horizon must be >= 1");
    require(model_horizon >= 1, ErrCode::InvalidStrategySpec, "model_horizon must be >= 1");
    require(model_horizon <= horizon, ErrCode::InvalidStrategySpec,
            "model_horizon must be <= horizon");
    switch (kind) {
      case StrategyKind::Recursive:
        break;  // any MH <= H; the final iteration truncates
      case StrategyKind::Direct:
        require(horizon % model_horizon == 0, ErrCode::InvalidStrategySpec,
                "direct needs horizon divisible by model_horizon (got H=" +
                    std::to_string(horizon) + ", MH=" + std::to_string(model_horizon) + ")");
        break;
      case StrategyKind::Mimo:
        require(model_horizon == horizon, ErrCode::InvalidStrategySpec,
                "mimo needs model_horizon == horizon");
        break;
      case StrategyKind::FlatWideMimo:
        require(model_horizon == horizon, ErrCode::InvalidStrategySpec,
                "flat_wide_mimo needs model_horizon == horizon");
        break;
    }
  }

  std::size_t n_segments() const {
    return kind == StrategyKind::Direct ? horizon / model_horizon : 1;
  }

  std::string name() const {
    return std::string(to_string(kind)) + "(mh=" + std::to_string(model_horizon) + ")";
  }

  static StrategySpec recursive(std::size_t horizon, std::size_t mh = 1) {
    return {StrategyKind::Recursive, horizon, mh, false};
  }
  static StrategySpec direct(std::size_t horizon, std::size_t mh) {
    return {StrategyKind::Direct, horizon, mh, false};
  }
  static StrategySpec mimo(std::size_t horizon) {
    return {StrategyKind::Mimo, horizon, horizon, false};
  }
  static StrategySpec flat_wide_mimo(std::size_t horizon, bool onehot = false) {
    return {StrategyKind::FlatWideMimo, horizon, horizon, onehot};
  }
};

enum class ForecastMode { Global, Multivariate };

/// Sample-pool layout. Global pools per-series rows; multivariate (channel
/// mixing) concatenates aligned series into joint rows. "multivariate_ci" is
/// a config alias: classical models process channels independently with no
/// weight sharing to speak of, so it trains exactly like global mode but
/// insists on aligned input.
struct ModeSpec {
  ForecastMode mode = ForecastMode::Global;
  bool require_alignment = false;
  std::string label = "global";

  static ModeSpec global() { return {ForecastMode::Global, false, "global"}; }
  static ModeSpec multivariate() { return {ForecastMode::Multivariate, true, "multivariate"}; }
  static ModeSpec multivariate_ci() { return {ForecastMode::Global, true, "multivariate_ci"}; }
};

}  // namespace strata
