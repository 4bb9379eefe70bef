#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbmfolio/date.hpp"
#include "gbmfolio/evaluation.hpp"
#include "gbmfolio/portfolio.hpp"

namespace gbmfolio::report {

/// Everything a pipeline run depends on. Defaults reproduce the original
/// study setup: calibrate on 2016-2018, evaluate on 2019.
struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "out";
  Date calibration_start{2016, 1, 1};
  Date calibration_end{2018, 12, 31};
  Date evaluation_start{2019, 1, 1};
  Date evaluation_end{2019, 12, 31};
  double risk_free = kDefaultRiskFree;
  std::size_t n_paths = 1000;
  std::size_t n_trials = 100000;
  std::uint64_t seed = 42;
  std::size_t group_count = 6;
  std::size_t group_size = 13;
  std::vector<HorizonSpec> horizons = default_horizons();
  MapeDenominator mape_denominator = MapeDenominator::forecast;
  std::vector<std::string> tickers;  // empty = every *.csv in data_dir
  unsigned threads = 0;

  /// Throws UsageError if the windows overlap or counts are zero.
  void validate() const;
};

/// Sets one `key = value` entry; keys match the RunConfig field names.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a flat key-value file (`key = value`, `#` comments).
void load_config_file(const std::filesystem::path& path, RunConfig& config);

/// Writes `value` with 12 significant digits.
std::string format_number(double value);

/// Files written by a command, relative to out_dir, in write order.
using OutputList = std::vector<std::filesystem::path>;

/// Per-ticker annual return, risk and Sharpe over the calibration window.
/// Writes stats.csv (+ .json sidecar) and stats.txt.
OutputList cmd_stats(const RunConfig& config);

/// Ranks the universe by `metric` over the calibration window and writes
/// groups_<metric>.csv; for sharpe also weights_sharpe.csv.
OutputList cmd_group(const RunConfig& config, RankMetric metric);

/// Simulates and scores one subject: a ticker, a group id such as
/// "return-1", "all" (every ticker) or "all-<metric>" (every group).
/// Writes eval_<id>.csv and envelope_<id>.csv per subject, plus
/// summary_<subject>.csv for the "all" forms.
OutputList cmd_simulate_evaluate(const RunConfig& config, std::string_view subject);

/// Full pipeline: stats, the three groupings, and every ticker and group
/// simulated and scored, with one summary table per category.
OutputList cmd_report(const RunConfig& config);

/// Writes a synthetic universe of `n_assets` GBM price histories as
/// daily-export CSVs (weekdays between start and end).
void write_synthetic_universe(const std::filesystem::path& dir, std::size_t n_assets,
                              std::uint64_t seed, Date start = Date(2016, 1, 4),
                              Date end = Date(2019, 12, 31));

}  // namespace gbmfolio::report
