#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "strata/cli/runner.hpp"

namespace {

void apply_overrides(strata::RunConfig& config, const CLI::Option* seed_opt, std::uint64_t seed,
                     const CLI::Option* dir_opt, const std::string& output_dir) {
  if (seed_opt->count() > 0) config.seed = seed;
  if (dir_opt->count() > 0) config.output_dir = output_dir;
}

void print_run_summary(const strata::SweepResult& result, const strata::RunConfig& config) {
  std::printf("cells: %zu run, %zu skipped (of %zu planned)\n", result.report.cells.size(),
              result.skipped.size(), result.planned);
  for (const auto& skip : result.skipped) {
    std::printf("  skipped %s [%s]: %s\n", skip.cell.id.c_str(), skip.reason.c_str(),
                skip.detail.c_str());
  }
  std::printf("config hash: %s\n", result.report.config_hash.c_str());
  std::printf("outputs in: %s\n\n", config.output_dir.c_str());
  std::fputs(strata::emit_report(result.report, "table", 10).c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strata: multi-step forecasting strategy engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string report_path;
  std::string output_dir;
  std::string format = "table";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t top = 10;
  bool emit_forecasts = false;

  CLI::App* validate = app.add_subcommand("validate-data", "Audit the configured dataset");
  validate->add_option("config", config_path, "config file (JSON)")->required();

  CLI::App* run = app.add_subcommand("run", "Run the single configured experiment");
  CLI::App* sweep = app.add_subcommand("sweep", "Run the full configuration grid");
  CLI::Option *run_seed = nullptr, *run_dir = nullptr, *sweep_seed = nullptr,
              *sweep_dir = nullptr;
  for (CLI::App* sub : {run, sweep}) {
    sub->add_option("config", config_path, "config file (JSON)")->required();
    CLI::Option* seed_opt = sub->add_option("--seed", seed, "override the config seed");
    CLI::Option* dir_opt =
        sub->add_option("--output-dir", output_dir, "override the output directory");
    sub->add_option("--jobs", jobs, "worker count (recorded; cells run sequentially)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--emit-forecasts", emit_forecasts, "write per-cell forecast CSVs");
    (sub == run ? run_seed : sweep_seed) = seed_opt;
    (sub == run ? run_dir : sweep_dir) = dir_opt;
  }

  CLI::App* backtest = app.add_subcommand("backtest", "Rolling-origin backtest of one cell");
  backtest->add_option("config", config_path, "config file (JSON)")->required();
  CLI::Option* bt_seed = backtest->add_option("--seed", seed, "override the config seed");
  CLI::Option* bt_dir =
      backtest->add_option("--output-dir", output_dir, "override the output directory");

  CLI::App* report = app.add_subcommand("report", "Re-render tables from a run directory");
  report->add_option("run_dir", report_path, "run output directory (or a cells.csv path)")
      ->required();
  report->add_option("--format", format, "table or csv")->default_str("table");
  report->add_option("--top", top, "leaderboard length")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) {
      const strata::RunConfig config = strata::parse_config(config_path);
      const strata::LongFrame frame = strata::load_long_csv(
          config.dataset.path, config.dataset.roles, config.dataset.freq);
      const strata::ValidationReport audit = strata::validate_frame(frame);
      std::fputs(strata::render_validation(audit, frame.frequency()).c_str(), stdout);
      return audit.ok() ? 0 : 3;
    }

    if (run->parsed() || sweep->parsed()) {
      strata::RunConfig config = strata::parse_config(config_path);
      apply_overrides(config, run->parsed() ? run_seed : sweep_seed, seed,
                      run->parsed() ? run_dir : sweep_dir, output_dir);
      strata::RunOptions options;
      options.jobs = jobs;
      options.emit_forecasts = emit_forecasts;
      const strata::SweepResult result = run->parsed() ? strata::run_single(config, options)
                                                       : strata::run_sweep(config, options);
      print_run_summary(result, config);
      return 0;
    }

    if (backtest->parsed()) {
      strata::RunConfig config = strata::parse_config(config_path);
      apply_overrides(config, bt_seed, seed, bt_dir, output_dir);
      const strata::BacktestRun bt = strata::run_backtest(config);
      std::printf("windows: %zu  points: %zu\n", bt.result.windows.size(), bt.result.n_points);
      for (std::size_t w = 0; w < bt.result.windows.size(); ++w) {
        const auto& window = bt.result.windows[w];
        std::printf("  window %zu  origin %s  MAE %.6g  MSE %.6g\n", w,
                    strata::format_timestamp(window.origin, config.dataset.freq).c_str(),
                    window.score.pooled.mae, window.score.pooled.mse);
      }
      std::printf("aggregate  MAE %.6g  MSE %.6g\n", bt.result.aggregate.mae,
                  bt.result.aggregate.mse);
      std::printf("written: %s\n", bt.csv_path.c_str());
      return 0;
    }

    if (report->parsed()) {
      const std::string cells_path =
          report_path.size() > 4 && report_path.substr(report_path.size() - 4) == ".csv"
              ? report_path
              : report_path + "/cells.csv";
      const strata::RunReport cells = strata::read_cells_csv(cells_path);
      std::fputs(strata::emit_report(cells, format, top).c_str(), stdout);
      return 0;
    }
  } catch (const strata::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.code() == strata::ErrCode::NoRunnableCells) return 4;
    return e.is_config_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 3;
  }
  return 0;
}
