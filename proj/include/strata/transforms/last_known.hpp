#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strata/transforms/lag_matrix.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

inline double last_known_forward(double v, double anchor, NormalizerMode mode) {
  return mode == NormalizerMode::Delta ? v - anchor : v / anchor;
}

inline double last_known_invert(double v, double anchor, NormalizerMode mode) {
  return mode == NormalizerMode::Delta ? v + anchor : v * anchor;
}

/// Rescales each wide row by its own most recent observed value: for every
/// block, the anchor L is that block's lag-0 target feature (already stored
/// per row), and target-derived cells become v-L (delta) or v/L (ratio).
/// apply_to picks feature columns, target columns, or both; datetime, id and
/// horizon-index columns are never touched. With normalize_exog set,
/// exogenous lag columns are rescaled by their own lag-0 value instead.
inline void apply_last_known(FeatureMatrix& m, const TransformSpec& spec) {
  require(spec.kind == TransformKind::LastKnownNormalizer, ErrCode::ConstraintError,
          "apply_last_known requires a last_known_normalizer spec");
  const bool do_features = spec.apply_to != ApplyTo::Target;
  const bool do_targets = spec.apply_to != ApplyTo::Features;
  const auto& columns = m.schema.columns;

  // Exogenous groups normalize against their own lag-0 column.
  struct ExogGroup {
    std::vector<std::size_t> member_columns;
    std::size_t lag0_column = 0;
  };
  std::vector<ExogGroup> exog_groups;
  if (do_features && spec.normalize_exog) {
    std::vector<bool> grouped(columns.size(), false);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].role != ColumnRole::ExogLag || grouped[i]) continue;
      ExogGroup g;
      bool found_lag0 = false;
      for (std::size_t j = i; j < columns.size(); ++j) {
        if (columns[j].role == ColumnRole::ExogLag && columns[j].block == columns[i].block &&
            columns[j].source == columns[i].source) {
          g.member_columns.push_back(j);
          grouped[j] = true;
          if (columns[j].lag == 0) {
            g.lag0_column = j;
            found_lag0 = true;
          }
        }
      }
      if (found_lag0) exog_groups.push_back(std::move(g));
    }
  }

  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    const RowAnchor& anchor = m.anchors[r];
    auto check_anchor = [&](double L, const std::string& what) {
      if (spec.mode == NormalizerMode::Ratio && L == 0.0) {
        raise(ErrCode::ZeroAnchor, "ratio normalization hit a zero " + what + " at row " +
                                       std::to_string(r) + " (anchor time " +
                                       std::to_string(anchor.anchor_ts) + ")");
      }
    };
    if (do_features) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (!columns[c].target_derived) continue;
        const double L = anchor.last_known[static_cast<std::size_t>(columns[c].block)];
        check_anchor(L, "last-known value");
        m.X.at(r, c) = last_known_forward(m.X.at(r, c), L, spec.mode);
      }
      for (const auto& g : exog_groups) {
        const double L = m.X.at(r, g.lag0_column);
        check_anchor(L, "lag-0 value of '" + columns[g.lag0_column].source + "'");
        for (std::size_t c : g.member_columns) {
          m.X.at(r, c) = last_known_forward(m.X.at(r, c), L, spec.mode);
        }
      }
    }
    if (do_targets) {
      for (std::size_t j = 0; j < m.schema.n_targets(); ++j) {
        const double L =
            anchor.last_known[static_cast<std::size_t>(m.schema.targets[j].block)];
        check_anchor(L, "last-known value");
        m.Y.at(r, j) = last_known_forward(m.Y.at(r, j), L, spec.mode);
      }
    }
  }
}

}  // namespace strata
