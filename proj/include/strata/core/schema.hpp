#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace strata {

enum class ColumnRole { TargetLag, ExogLag, Datetime, Id, HorizonIndex };

inline const char* to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::TargetLag: return "target_lag";
    case ColumnRole::ExogLag: return "exog_lag";
    case ColumnRole::Datetime: return "datetime";
    case ColumnRole::Id: return "id";
    case ColumnRole::HorizonIndex: return "horizon_index";
  }
  return "?";
}

/// One feature column of a wide sample matrix. `lag` is in steps: a lag of k
/// means the value observed at anchor_ts - k * step. `block` identifies which
/// series the column derives from in multivariate layouts (0 in global mode,
/// -1 for columns shared across series such as datetime or horizon index).
struct ColumnInfo {
  std::string source;
  std::int64_t lag = 0;
  ColumnRole role = ColumnRole::TargetLag;
  int block = 0;
  bool target_derived = false;

  bool operator==(const ColumnInfo&) const = default;
};

/// One target column: the value of series `block` at anchor_ts + step * freq.
/// step == 0 marks flattened layouts where the step is the row's horizon index.
struct TargetInfo {
  int block = 0;
  int step = 1;

  bool operator==(const TargetInfo&) const = default;
};

struct FeatureSchema {
  std::vector<ColumnInfo> columns;
  std::vector<TargetInfo> targets;
  std::vector<std::string> block_ids;  // series id per block; single entry in global mode
  std::size_t history = 0;

  std::size_t n_features() const { return columns.size(); }
  std::size_t n_targets() const { return targets.size(); }

  /// Index of the target-lag column for `block` at the given lag, or -1.
  int find_target_lag(int block, std::int64_t lag) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto& c = columns[i];
      if (c.role == ColumnRole::TargetLag && c.block == block && c.lag == lag) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  bool operator==(const FeatureSchema&) const = default;
};

}  // namespace strata
