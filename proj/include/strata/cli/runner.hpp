#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "strata/cli/config.hpp"
#include "strata/core/csv.hpp"
#include "strata/core/log.hpp"
#include "strata/data/validate.hpp"
#include "strata/validation/backtest.hpp"
#include "strata/validation/report.hpp"
#include "strata/validation/trainer.hpp"

namespace strata {

struct RunOptions {
  std::size_t jobs = 1;          // recorded in the manifest; cells run sequentially
  bool emit_forecasts = false;
};

/// One grid point of a sweep, resolved to concrete specs plus the label
/// strings that appear in every output file.
struct CellPlan {
  std::string id;
  std::string model_label;
  std::string strategy_label;
  std::string mode_label;
  std::string preprocessing;
  std::string datetime_features;
  std::string id_features;
  StrategySpec strategy;
  ModeSpec mode;
  ModelSpec model;
};

struct SkipRecord {
  CellPlan cell;
  std::string reason;   // error code name, machine-readable
  std::string detail;
};

struct SweepResult {
  RunReport report;
  std::vector<SkipRecord> skipped;
  std::vector<double> wall_ms;  // parallel to report.cells
  std::size_t planned = 0;
};

namespace detail {

/// Model grid labels: the kind name, or kind#k when a kind repeats.
inline std::vector<std::string> model_labels(const std::vector<ModelSpec>& models) {
  std::map<std::string, std::size_t> total;
  for (const auto& m : models) ++total[to_string(m.kind)];
  std::map<std::string, std::size_t> seen;
  std::vector<std::string> labels;
  for (const auto& m : models) {
    const std::string kind = to_string(m.kind);
    if (total[kind] == 1) {
      labels.push_back(kind);
    } else {
      labels.push_back(kind + "#" + std::to_string(++seen[kind]));
    }
  }
  return labels;
}

inline std::int64_t last_timestamp_of(const LongFrame& frame) {
  require(frame.n_series() > 0, ErrCode::EmptyDataset, "empty frame");
  std::int64_t last = frame.series(0).timestamps.back();
  for (const auto& s : frame.all_series()) last = std::max(last, s.timestamps.back());
  return last;
}

}  // namespace detail

/// The sweep grid in its canonical order: strategy, mode, preprocessing,
/// datetime features, id features, model (innermost). Cell ids hash the
/// label tuple, so they are stable across runs and config reorderings.
inline std::vector<CellPlan> enumerate_cells(const RunConfig& config) {
  const std::vector<std::string> model_names = detail::model_labels(config.models);
  std::vector<CellPlan> cells;
  for (const auto& strategy : config.strategies) {
    for (const auto& mode : config.modes) {
      for (const auto& pp : config.preprocessing) {
        for (const auto& dt : config.datetime_features) {
          for (const auto& idf : config.id_features) {
            for (std::size_t m = 0; m < config.models.size(); ++m) {
              CellPlan cell;
              cell.strategy = strategy;
              cell.mode = mode;
              cell.model = config.models[m];
              cell.model_label = model_names[m];
              cell.strategy_label = to_string(strategy.kind);
              cell.mode_label = mode.label;
              cell.preprocessing = pp;
              cell.datetime_features = dt;
              cell.id_features = idf;
              cell.id = hex64(fnv1a64(cell.strategy_label + "/" +
                                      std::to_string(strategy.model_horizon) + "/" +
                                      cell.mode_label + "/" + pp + "/" + dt + "/" + idf + "/" +
                                      cell.model_label));
              cells.push_back(std::move(cell));
            }
          }
        }
      }
    }
  }
  return cells;
}

/// Runs one cell: CV over the pre-test range, fold-ensemble forecast over
/// the held-out last H points, metric rows per fold plus pooled aggregates.
inline ReportCell run_cell(const LongFrame& frame, const RunConfig& config, const CellPlan& plan,
                           Forecast* out_forecast = nullptr) {
  const PipelineConfig pipeline = make_pipeline(plan.preprocessing, plan.datetime_features,
                                                plan.id_features, config.history);
  const auto [train_frame, test_frame] = temporal_split(frame, config.horizon);
  (void)test_frame;  // truth points are matched by timestamp in the full frame

  const SplitPlan splits =
      make_cv_splits(train_frame, config.validation.scheme, config.validation.folds,
                     config.horizon, config.validation.window);
  const CvResult cv = cv_fit_ensemble(train_frame, pipeline, plan.strategy, plan.mode,
                                      plan.model, splits);

  ReportCell cell;
  cell.id = plan.id;
  cell.model = plan.model_label;
  cell.strategy = plan.strategy_label;
  cell.model_horizon = plan.strategy.model_horizon;
  cell.mode = plan.mode_label;
  cell.preprocessing = plan.preprocessing;
  cell.datetime_features = plan.datetime_features;
  cell.id_features = plan.id_features;

  std::map<std::string, MetricAccumulator> val_series;
  for (std::size_t k = 0; k < cv.folds.size(); ++k) {
    const ForecastScore& score = cv.folds[k].score;
    cell.rows.push_back(
        {static_cast<int>(k), "val", score.pooled.mae, score.pooled.mse});
    for (const auto& [id, m] : score.per_series) {
      // Each series contributes exactly horizon points per fold.
      MetricAccumulator& acc = val_series[id];
      acc.abs_sum += m.mae * static_cast<double>(config.horizon);
      acc.sq_sum += m.mse * static_cast<double>(config.horizon);
      acc.n += config.horizon;
    }
  }
  cell.val_mae = cv.validation.mae;
  cell.val_mse = cv.validation.mse;
  cell.rows.push_back({-1, "val", cell.val_mae, cell.val_mse});
  for (const auto& [id, acc] : val_series) cell.val_series_metrics[id] = acc.finish();

  const std::int64_t origin = detail::last_timestamp_of(train_frame);
  const Forecast ensemble = cv.ensemble.forecast(frame, origin);
  const ForecastScore test_score = score_forecast(ensemble, frame);
  cell.test_mae = test_score.pooled.mae;
  cell.test_mse = test_score.pooled.mse;
  cell.test_series_metrics = test_score.per_series;
  cell.rows.push_back({-1, "test", cell.test_mae, cell.test_mse});

  if (out_forecast != nullptr) *out_forecast = ensemble;
  return cell;
}

namespace detail {

inline void write_metrics_csv(const std::string& path, const RunReport& report) {
  csv::Writer out(path);
  out.write_row({"cell_id", "model", "strategy", "mh", "mode", "preprocessing",
                 "datetime_features", "id_features", "fold", "split", "mae", "mse"});
  for (const auto& cell : report.cells) {
    for (const auto& row : cell.rows) {
      out.write_row({cell.id, cell.model, cell.strategy, std::to_string(cell.model_horizon),
                     cell.mode, cell.preprocessing, cell.datetime_features, cell.id_features,
                     std::to_string(row.fold), row.split, cfg::format_double(row.mae),
                     cfg::format_double(row.mse)});
    }
  }
}

inline void write_cells_csv(const std::string& path, const RunReport& report) {
  csv::Writer out(path);
  out.write_row({"cell_id", "model", "strategy", "mh", "mode", "preprocessing",
                 "datetime_features", "id_features", "val_mae", "val_mse", "test_mae",
                 "test_mse", "config_hash", "seed"});
  for (const auto& cell : report.cells) {
    out.write_row({cell.id, cell.model, cell.strategy, std::to_string(cell.model_horizon),
                   cell.mode, cell.preprocessing, cell.datetime_features, cell.id_features,
                   cfg::format_double(cell.val_mae), cfg::format_double(cell.val_mse),
                   cfg::format_double(cell.test_mae), cfg::format_double(cell.test_mse),
                   report.config_hash, std::to_string(report.seed)});
  }
}

inline void write_rank_tables_csv(const std::string& path, const RunReport& report) {
  csv::Writer out(path);
  out.write_row({"hyperparameter", "value", "mean_rank", "median_mae", "n_cells", "n_groups",
                 "config_hash", "seed"});
  for (const auto& axis : hyperparameter_names()) {
    for (const auto& row : rank_table(report.cells, axis, /*allow_degenerate=*/true)) {
      out.write_row({axis, row.value, cfg::format_double(row.mean_rank),
                     cfg::format_double(row.median_mae), std::to_string(row.n_cells),
                     std::to_string(row.n_groups), report.config_hash,
                     std::to_string(report.seed)});
    }
  }
}

inline void write_manifest(const std::string& path, const RunConfig& config,
                           const SweepResult& result) {
  nlohmann::json j;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  j["config"] = canonical_config(config);
  j["cells_planned"] = result.planned;
  j["cells_run"] = result.report.cells.size();
  j["cells_skipped"] = result.skipped.size();
  j["cells"] = nlohmann::json::array();
  for (std::size_t i = 0; i < result.report.cells.size(); ++i) {
    const ReportCell& cell = result.report.cells[i];
    nlohmann::json entry;
    entry["id"] = cell.id;
    entry["status"] = "ok";
    entry["model"] = cell.model;
    entry["strategy"] = cell.strategy;
    entry["mh"] = cell.model_horizon;
    entry["mode"] = cell.mode;
    entry["preprocessing"] = cell.preprocessing;
    entry["datetime_features"] = cell.datetime_features;
    entry["id_features"] = cell.id_features;
    entry["wall_ms"] = result.wall_ms[i];
    j["cells"].push_back(std::move(entry));
  }
  for (const auto& skip : result.skipped) {
    nlohmann::json entry;
    entry["id"] = skip.cell.id;
    entry["status"] = "skipped";
    entry["model"] = skip.cell.model_label;
    entry["strategy"] = skip.cell.strategy_label;
    entry["mh"] = skip.cell.strategy.model_horizon;
    entry["mode"] = skip.cell.mode_label;
    entry["preprocessing"] = skip.cell.preprocessing;
    entry["datetime_features"] = skip.cell.datetime_features;
    entry["id_features"] = skip.cell.id_features;
    entry["reason"] = skip.reason;
    entry["detail"] = skip.detail;
    j["cells"].push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::IoError, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace detail

inline LongFrame load_dataset(const RunConfig& config) {
  const LongFrame frame =
      load_long_csv(config.dataset.path, config.dataset.roles, config.dataset.freq);
  const ValidationReport report = validate_frame(frame);
  if (!report.ok()) {
    raise(ErrCode::ValidationFailed,
          "dataset '" + config.dataset.path + "' failed validation: " + report.violations[0] +
              (report.violations.size() > 1
                   ? " (+" + std::to_string(report.violations.size() - 1) + " more)"
                   : ""));
  }
  return frame;
}

/// Executes the full grid. Structurally impossible combinations are skipped
/// with a machine-readable reason (the error code name); the run fails only
/// when nothing is runnable. Writes metrics.csv, cells.csv, rank_tables.csv,
/// manifest.json, and optionally per-cell forecast CSVs.
inline SweepResult run_sweep(const RunConfig& config, const RunOptions& options = {}) {
  const LongFrame frame = load_dataset(config);
  const bool aligned = check_alignment(frame);
  const std::vector<CellPlan> cells = enumerate_cells(config);

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  if (options.emit_forecasts) fs::create_directories(config.output_dir + "/forecasts");

  SweepResult result;
  result.planned = cells.size();
  result.report.config_hash = config_hash(config);
  result.report.seed = config.seed;

  for (const CellPlan& plan : cells) {
    if (plan.mode.require_alignment && !aligned) {
      result.skipped.push_back(
          {plan, "NotAligned", "mode '" + plan.mode.label + "' requires aligned series"});
      log::warn("skipping cell " + plan.id + ": NotAligned");
      continue;
    }
    if (plan.id_features != "none" && plan.mode.mode == ForecastMode::Multivariate) {
      result.skipped.push_back(
          {plan, "ConstraintError", "id features are undefined in multivariate mode"});
      log::warn("skipping cell " + plan.id + ": id features x multivariate");
      continue;
    }
    if (plan.datetime_features != "none" && !frame.frequency().calendar()) {
      result.skipped.push_back(
          {plan, "OrdinalTimestamps", "datetime features need calendar timestamps"});
      log::warn("skipping cell " + plan.id + ": OrdinalTimestamps");
      continue;
    }
    try {
      const auto started = std::chrono::steady_clock::now();
      Forecast forecast;
      ReportCell cell =
          run_cell(frame, config, plan, options.emit_forecasts ? &forecast : nullptr);
      const auto elapsed = std::chrono::steady_clock::now() - started;
      result.wall_ms.push_back(
          std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count() / 1000.0);
      result.report.cells.push_back(std::move(cell));
      if (options.emit_forecasts) {
        forecast.write_csv(config.output_dir + "/forecasts/" + plan.id + ".csv");
      }
    } catch (const Error& e) {
      result.skipped.push_back({plan, to_string(e.code()), e.what()});
      log::warn("skipping cell " + plan.id + ": " + e.what());
    }
  }

  if (result.report.cells.empty()) {
    raise(ErrCode::NoRunnableCells,
          "all " + std::to_string(cells.size()) + " cells were skipped; first reason: " +
              (result.skipped.empty() ? "none" : result.skipped[0].detail));
  }

  detail::write_metrics_csv(config.output_dir + "/metrics.csv", result.report);
  detail::write_cells_csv(config.output_dir + "/cells.csv", result.report);
  detail::write_rank_tables_csv(config.output_dir + "/rank_tables.csv", result.report);
  detail::write_manifest(config.output_dir + "/manifest.json", config, result);
  return result;
}

/// `run` is a sweep constrained to a single grid point.
inline SweepResult run_single(const RunConfig& config, const RunOptions& options = {}) {
  require(config.strategies.size() == 1 && config.modes.size() == 1 &&
              config.preprocessing.size() == 1 && config.datetime_features.size() == 1 &&
              config.id_features.size() == 1 && config.models.size() == 1,
          ErrCode::ConstraintError,
          "run expects exactly one entry per grid; use the sweep command for grids");
  return run_sweep(config, options);
}

struct BacktestRun {
  BacktestResult result;
  std::string csv_path;
};

/// Rolling-origin backtest of the single configured cell; writes
/// backtest.csv with one row per window plus a pooled aggregate row.
inline BacktestRun run_backtest(const RunConfig& config, const RunOptions& options = {}) {
  (void)options;
  require(config.strategies.size() == 1 && config.modes.size() == 1 &&
              config.preprocessing.size() == 1 && config.datetime_features.size() == 1 &&
              config.id_features.size() == 1 && config.models.size() == 1,
          ErrCode::ConstraintError,
          "backtest expects exactly one entry per grid; use the sweep command for grids");
  const LongFrame frame = load_dataset(config);
  const CellPlan plan = enumerate_cells(config).front();
  const PipelineConfig pipeline = make_pipeline(plan.preprocessing, plan.datetime_features,
                                                plan.id_features, config.history);
  const std::size_t stride = config.validation.backtest_stride == 0
                                 ? config.horizon
                                 : config.validation.backtest_stride;

  BacktestRun run;
  run.result = backtest(frame, pipeline, plan.strategy, plan.mode, plan.model,
                        config.validation.backtest_windows, stride);

  std::filesystem::create_directories(config.output_dir);
  run.csv_path = config.output_dir + "/backtest.csv";
  csv::Writer out(run.csv_path);
  out.write_row({"window", "origin", "mae", "mse", "n_points"});
  for (std::size_t w = 0; w < run.result.windows.size(); ++w) {
    const BacktestWindow& window = run.result.windows[w];
    out.write_row({std::to_string(w), format_timestamp(window.origin, frame.frequency()),
                   cfg::format_double(window.score.pooled.mae),
                   cfg::format_double(window.score.pooled.mse),
                   std::to_string(window.score.n_points)});
  }
  out.write_row({"-1", "aggregate", cfg::format_double(run.result.aggregate.mae),
                 cfg::format_double(run.result.aggregate.mse),
                 std::to_string(run.result.n_points)});
  return run;
}

namespace detail {

inline std::size_t parse_count_field(const std::string& text, const std::string& path,
                                     std::size_t row) {
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    raise(ErrCode::ParseError,
          path + " row " + std::to_string(row + 2) + ": '" + text + "' is not a count");
  }
}

inline double parse_metric_field(const std::string& text, const std::string& path,
                                 std::size_t row) {
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    raise(ErrCode::ParseError,
          path + " row " + std::to_string(row + 2) + ": '" + text + "' is not a number");
  }
}

}  // namespace detail

/// Reloads completed cells from a run directory's cells.csv.
inline RunReport read_cells_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  auto col = [&](const std::string& name) {
    const int idx = table.column_index(name);
    if (idx < 0) raise(ErrCode::MissingColumn, "column '" + name + "' not found in " + path);
    return static_cast<std::size_t>(idx);
  };
  const std::size_t c_id = col("cell_id"), c_model = col("model"), c_strategy = col("strategy"),
                    c_mh = col("mh"), c_mode = col("mode"), c_pp = col("preprocessing"),
                    c_dt = col("datetime_features"), c_idf = col("id_features"),
                    c_vmae = col("val_mae"), c_vmse = col("val_mse"), c_tmae = col("test_mae"),
                    c_tmse = col("test_mse"), c_hash = col("config_hash"), c_seed = col("seed");

  RunReport report;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ReportCell cell;
    cell.id = row[c_id];
    cell.model = row[c_model];
    cell.strategy = row[c_strategy];
    cell.model_horizon = detail::parse_count_field(row[c_mh], path, r);
    cell.mode = row[c_mode];
    cell.preprocessing = row[c_pp];
    cell.datetime_features = row[c_dt];
    cell.id_features = row[c_idf];
    cell.val_mae = detail::parse_metric_field(row[c_vmae], path, r);
    cell.val_mse = detail::parse_metric_field(row[c_vmse], path, r);
    cell.test_mae = detail::parse_metric_field(row[c_tmae], path, r);
    cell.test_mse = detail::parse_metric_field(row[c_tmse], path, r);
    report.config_hash = row[c_hash];
    report.seed = detail::parse_count_field(row[c_seed], path, r);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

namespace detail {

inline std::string short_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string pad(const std::string& text, std::size_t width) {
  if (text.size() >= width) return text;
  return text + std::string(width - text.size(), ' ');
}

}  // namespace detail

/// Renders the per-hyperparameter rank tables and the best-combinations
/// leaderboard. `format` is "table" (aligned, human-oriented) or "csv"
/// (machine-oriented, same values). Raises EmptyReport without cells.
inline std::string emit_report(const RunReport& report, const std::string& format,
                               std::size_t top) {
  require(format == "table" || format == "csv", ErrCode::ConstraintError,
          "format must be 'table' or 'csv' (got '" + format + "')");
  require(!report.cells.empty(), ErrCode::EmptyReport, "no completed cells to report");

  std::string out;
  const bool csv_mode = format == "csv";

  if (csv_mode) {
    out += "hyperparameter,value,mean_rank,median_mae,n_cells,n_groups\n";
  }
  for (const auto& axis : hyperparameter_names()) {
    const std::vector<RankRow> table = rank_table(report.cells, axis, /*allow_degenerate=*/true);
    if (csv_mode) {
      for (const auto& row : table) {
        out += axis + "," + csv::quote_if_needed(row.value, ',') + "," +
               detail::short_double(row.mean_rank) + "," + detail::short_double(row.median_mae) +
               "," + std::to_string(row.n_cells) + "," + std::to_string(row.n_groups) + "\n";
      }
    } else {
      out += "rank by " + axis + "\n";
      out += "  " + detail::pad("value", 20) + detail::pad("mean_rank", 12) +
             detail::pad("median_mae", 14) + detail::pad("cells", 7) + "groups\n";
      for (const auto& row : table) {
        out += "  " + detail::pad(row.value, 20) +
               detail::pad(detail::short_double(row.mean_rank), 12) +
               detail::pad(detail::short_double(row.median_mae), 14) +
               detail::pad(std::to_string(row.n_cells), 7) + std::to_string(row.n_groups) + "\n";
      }
      out += "\n";
    }
  }

  const std::vector<const ReportCell*> best = leaderboard(report.cells, top);
  if (csv_mode) {
    out += "\nposition,model,strategy,mh,mode,preprocessing,datetime_features,id_features,"
           "val_mae,test_mae\n";
    for (std::size_t i = 0; i < best.size(); ++i) {
      const ReportCell& c = *best[i];
      out += std::to_string(i + 1) + "," + csv::quote_if_needed(c.model, ',') + "," + c.strategy +
             "," + std::to_string(c.model_horizon) + "," + c.mode + "," + c.preprocessing + "," +
             c.datetime_features + "," + c.id_features + "," + detail::short_double(c.val_mae) +
             "," + detail::short_double(c.test_mae) + "\n";
    }
  } else {
    out += "best " + std::to_string(best.size()) + " combinations (validation MAE, then test)\n";
    out += "  " + detail::pad("#", 4) + detail::pad("model", 16) + detail::pad("strategy", 16) +
           detail::pad("mh", 4) + detail::pad("mode", 17) + detail::pad("preprocessing", 15) +
           detail::pad("datetime", 10) + detail::pad("id", 8) + detail::pad("val_mae", 12) +
           "test_mae\n";
    for (std::size_t i = 0; i < best.size(); ++i) {
      const ReportCell& c = *best[i];
      out += "  " + detail::pad(std::to_string(i + 1), 4) + detail::pad(c.model, 16) +
             detail::pad(c.strategy, 16) + detail::pad(std::to_string(c.model_horizon), 4) +
             detail::pad(c.mode, 17) + detail::pad(c.preprocessing, 15) +
             detail::pad(c.datetime_features, 10) + detail::pad(c.id_features, 8) +
             detail::pad(detail::short_double(c.val_mae), 12) +
             detail::short_double(c.test_mae) + "\n";
    }
  }
  return out;
}

/// Human-readable dataset audit for the validate-data command.
inline std::string render_validation(const ValidationReport& report, const FrequencySpec& freq) {
  std::string out;
  out += "series: " + std::to_string(report.series.size()) + "\n";
  for (const auto& s : report.series) {
    out += "  " + detail::pad(s.id, 20) + "length " + detail::pad(std::to_string(s.length), 8) +
           format_timestamp(s.first_timestamp, freq) + " .. " +
           format_timestamp(s.last_timestamp, freq);
    if (s.irregularities > 0) {
      out += "  irregular deltas: " + std::to_string(s.irregularities);
    }
    if (s.missing_values > 0) out += "  missing values: " + std::to_string(s.missing_values);
    out += "\n";
  }
  out += std::string("aligned: ") + (report.aligned ? "yes" : "no") + "\n";
  if (report.ok()) {
    out += "ok\n";
  } else {
    out += "violations: " + std::to_string(report.violations.size()) + "\n";
    for (const auto& v : report.violations) out += "  " + v + "\n";
  }
  return out;
}

}  // namespace strata
