#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "strata/validation/metrics.hpp"

namespace strata {

/// One metric observation of a cell: fold >= 0 for individual folds, -1 for
/// the fold-pooled aggregate; split is "val" or "test".
struct MetricRow {
  int fold = -1;
  std::string split;
  double mae = 0.0;
  double mse = 0.0;
};

/// One experiment cell: a full hyperparameter combination with its scores.
struct ReportCell {
  std::string id;
  std::string model;
  std::string strategy;
  std::size_t model_horizon = 1;
  std::string mode;
  std::string preprocessing;
  std::string datetime_features;
  std::string id_features;

  std::vector<MetricRow> rows;                       // per-fold detail + aggregates
  std::map<std::string, Metrics> val_series_metrics;
  std::map<std::string, Metrics> test_series_metrics;
  double val_mae = std::numeric_limits<double>::quiet_NaN();
  double val_mse = std::numeric_limits<double>::quiet_NaN();
  double test_mae = std::numeric_limits<double>::quiet_NaN();
  double test_mse = std::numeric_limits<double>::quiet_NaN();
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<ReportCell> cells;
};

inline const std::vector<std::string>& hyperparameter_names() {
  static const std::vector<std::string> names = {
      "model", "strategy", "mode", "preprocessing", "datetime_features", "id_features"};
  return names;
}

/// The cell's value of one named hyperparameter axis. The model horizon is
/// part of the strategy value ("recursive(mh=1)" vs "recursive(mh=6)" are
/// different strategies to compare), not an axis of its own.
inline std::string cell_setting(const ReportCell& c, const std::string& hyperparameter) {
  if (hyperparameter == "model") return c.model;
  if (hyperparameter == "strategy") {
    return c.strategy + "(mh=" + std::to_string(c.model_horizon) + ")";
  }
  if (hyperparameter == "mode") return c.mode;
  if (hyperparameter == "preprocessing") return c.preprocessing;
  if (hyperparameter == "datetime_features") return c.datetime_features;
  if (hyperparameter == "id_features") return c.id_features;
  raise(ErrCode::ConstraintError, "unknown hyperparameter '" + hyperparameter + "'");
}

/// Ranks 1..k by ascending value with ties averaged: equal values share the
/// mean of the positions they occupy, so every group's ranks sum to k(k+1)/2.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>((i + 1) + (j + 1));  // mean of positions
    for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = shared;
    i = j + 1;
  }
  return ranks;
}

/// Aggregated standing of one hyperparameter value across comparison groups.
struct RankRow {
  std::string value;
  double mean_rank = 0.0;
  double median_mae = 0.0;
  std::size_t n_cells = 0;   // ranked cells carrying this value
  std::size_t n_groups = 0;  // comparison groups the value appeared in
};

/// Compares cells that differ only in `hyperparameter`: each such group is
/// ranked by validation MAE (ties averaged), and every value's ranks are
/// averaged across groups. Median MAE is taken over the same ranked cells.
/// Every comparison group must have >= 2 cells; a singleton group raises
/// DegenerateGroup. With `allow_degenerate`, singleton groups (which carry
/// no comparison) are instead dropped — unless nothing else remains, in
/// which case each lone cell ranks first in its own group, so a one-cell
/// report still renders single-row tables.
inline std::vector<RankRow> rank_table(const std::vector<ReportCell>& cells,
                                       const std::string& hyperparameter,
                                       bool allow_degenerate = false) {
  std::map<std::string, std::vector<const ReportCell*>> groups;
  for (const auto& c : cells) {
    std::string key;
    for (const auto& name : hyperparameter_names()) {
      if (name == hyperparameter) continue;
      key += cell_setting(c, name);
      key += '\x1f';
    }
    groups[key].push_back(&c);
  }

  bool any_multi = false;
  for (const auto& [key, members] : groups) {
    (void)key;
    if (members.size() >= 2) {
      any_multi = true;
    } else if (!allow_degenerate) {
      raise(ErrCode::DegenerateGroup,
            "comparison group for '" + hyperparameter + "' has a single cell (value '" +
                cell_setting(*members.front(), hyperparameter) +
                "'); every group needs >= 2 cells to rank");
    }
  }
  if (groups.empty()) {
    raise(ErrCode::DegenerateGroup, "no cells to rank for '" + hyperparameter + "'");
  }

  struct Agg {
    double rank_sum = 0.0;
    std::size_t n_ranks = 0;
    std::size_t n_groups = 0;
    std::vector<double> maes;
  };
  std::map<std::string, Agg> by_value;

  for (const auto& [key, members] : groups) {
    (void)key;
    if (members.size() < 2 && any_multi) continue;  // only reachable when allow_degenerate
    std::vector<double> maes;
    maes.reserve(members.size());
    for (const ReportCell* c : members) maes.push_back(c->val_mae);
    const std::vector<double> ranks = average_ranks(maes);
    for (std::size_t i = 0; i < members.size(); ++i) {
      Agg& agg = by_value[cell_setting(*members[i], hyperparameter)];
      agg.rank_sum += ranks[i];
      agg.n_ranks += 1;
      agg.n_groups += 1;
      agg.maes.push_back(maes[i]);
    }
  }

  std::vector<RankRow> table;
  for (const auto& [value, agg] : by_value) {
    RankRow row;
    row.value = value;
    row.mean_rank = agg.rank_sum / static_cast<double>(agg.n_ranks);
    row.median_mae = median(agg.maes);
    row.n_cells = agg.n_ranks;
    row.n_groups = agg.n_groups;
    table.push_back(std::move(row));
  }
  std::sort(table.begin(), table.end(),
            [](const RankRow& a, const RankRow& b) { return a.mean_rank < b.mean_rank; });
  return table;
}

/// Cells ordered best-first by validation MAE, test MAE breaking ties,
/// clamped to at most `top`.
inline std::vector<const ReportCell*> leaderboard(const std::vector<ReportCell>& cells,
                                                  std::size_t top) {
  require(!cells.empty(), ErrCode::EmptyReport, "no completed cells to report");
  std::vector<const ReportCell*> order;
  order.reserve(cells.size());
  for (const auto& c : cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const ReportCell* a, const ReportCell* b) {
    if (a->val_mae != b->val_mae) return a->val_mae < b->val_mae;
    return a->test_mae < b->test_mae;
  });
  if (order.size() > top) order.resize(top);
  return order;
}

}  // namespace strata
