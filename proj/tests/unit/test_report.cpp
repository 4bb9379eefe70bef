#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gbmfolio/errors.hpp"
#include "gbmfolio/report.hpp"
#include "gbmfolio/stats.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace gbmfolio;
using namespace gbmfolio::report;
using testsupport::read_text;
using testsupport::TempDir;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_text(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const auto kDays = testsupport::weekdays_between(Date(2016, 1, 4), Date(2019, 12, 31));

/// Writes `n` random-walk assets named A00.. into dir.
void write_universe(const std::filesystem::path& dir, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mu(-0.0005, 0.0015), sigma(0.01, 0.03);
  for (std::size_t j = 0; j < n; ++j) {
    char name[16];
    std::snprintf(name, sizeof(name), "A%02zu", j);
    testsupport::write_price_csv(dir / (std::string(name) + ".csv"), kDays,
                                 testsupport::random_walk_prices(rng, kDays.size(), mu(rng), sigma(rng)));
  }
}

RunConfig small_config(const TempDir& dir) {
  RunConfig c;
  c.data_dir = dir.path() / "data";
  c.out_dir = dir.path() / "out";
  c.n_paths = 50;
  c.n_trials = 200;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("format_number round-trips within 1e-9") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> mag(-6, 4), sign(-1, 1);
    for (int i = 0; i < 2000; ++i) {
      const double v = std::pow(10.0, mag(rng)) * (sign(rng) < 0 ? -1 : 1);
      const double back = std::stod(format_number(v));
      CHECK(std::abs(back - v) <= 1e-9 * std::max(1.0, std::abs(v)));
    }
  }

  TEST_CASE("config file and settings") {
    TempDir dir;
    testsupport::write_text(dir.path() / "run.cfg",
                            "# comment\n"
                            "seed = 99\n"
                            "n_paths=10\n"
                            "risk_free = 0.05  # trailing\n"
                            "horizons = 1w,1m\n"
                            "tickers = A, B\n"
                            "mape_denominator = actual\n"
                            "evaluation_start = 2019-01-02\n");
    RunConfig c;
    load_config_file(dir.path() / "run.cfg", c);
    CHECK(c.seed == 99);
    CHECK(c.n_paths == 10);
    CHECK(c.risk_free == 0.05);
    CHECK(c.horizons.size() == 2);
    CHECK(c.tickers == std::vector<std::string>{"A", "B"});
    CHECK(c.mape_denominator == MapeDenominator::actual);
    CHECK(c.evaluation_start == Date(2019, 1, 2));
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), UsageError);
    CHECK_THROWS_AS(apply_setting(c, "n_paths", "ten"), UsageError);
    CHECK_THROWS_AS(load_config_file(dir.path() / "missing.cfg", c), UsageError);

    RunConfig overlap;
    overlap.evaluation_start = Date(2018, 6, 1);
    CHECK_THROWS_AS(overlap.validate(), UsageError);
  }

  TEST_CASE("stats: constant-growth asset reports zero risk and NA Sharpe") {
    TempDir dir;
    auto c = small_config(dir);
    std::vector<double> p;
    for (std::size_t k = 0; k < kDays.size(); ++k) p.push_back(10.0 * std::exp(0.0005 * k));
    testsupport::write_price_csv(c.data_dir / "FLAT.csv", kDays, p);
    cmd_stats(c);
    const auto rows = read_csv(c.out_dir / "stats.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"ticker", "return_annual", "risk_annual", "sharpe"});
    CHECK(rows[1][0] == "FLAT");
    CHECK(std::stod(rows[1][2]) == 0.0);
    CHECK(rows[1][3] == "NA");
    CHECK(std::filesystem::exists(c.out_dir / "stats.txt"));
    CHECK(std::filesystem::exists(c.out_dir / "stats.csv.json"));
  }

  TEST_CASE("stats rows equal the stats module") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 4, 3);
    cmd_stats(c);
    const auto rows = read_csv(c.out_dir / "stats.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto series = slice_period(load_csv(c.data_dir / (rows[i][0] + ".csv"), rows[i][0]),
                                       c.calibration_start, c.calibration_end);
      const auto s = asset_stats(series, c.risk_free);
      CHECK(std::abs(std::stod(rows[i][1]) - s.return_annual) <= 1e-9);
      CHECK(std::abs(std::stod(rows[i][2]) - s.risk_annual) <= 1e-9);
      CHECK(std::abs(std::stod(rows[i][3]) - *s.sharpe) <= 1e-9);
    }

    const auto sidecar = nlohmann::json::parse(read_text(c.out_dir / "stats.csv.json"));
    CHECK(sidecar["command"] == "stats");
    CHECK(sidecar["config"]["seed"] == 7);
    CHECK(sidecar["sha256"].get<std::string>().size() == 64);
  }

  TEST_CASE("stats with no tickers writes only the header") {
    TempDir dir;
    auto c = small_config(dir);
    std::filesystem::create_directories(c.data_dir);
    cmd_stats(c);
    CHECK(read_text(c.out_dir / "stats.csv") == "ticker,return_annual,risk_annual,sharpe\n");
  }

  TEST_CASE("stats with a missing ticker file is a data error") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 1, 3);
    c.tickers = {"A00", "NOPE"};
    CHECK_THROWS_AS(cmd_stats(c), DataError);
  }

  TEST_CASE("group: singleton groups in descending return order") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 6, 5);
    c.group_count = 6;
    c.group_size = 1;
    cmd_group(c, RankMetric::return_annual);
    const auto rows = read_csv(c.out_dir / "groups_return.csv");
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[1].size() == 7);
    double prev = 1e300;
    for (std::size_t g = 1; g <= 6; ++g) {
      const auto s = asset_stats(slice_period(load_csv(c.data_dir / (rows[1][g] + ".csv"), rows[1][g]),
                                              c.calibration_start, c.calibration_end));
      CHECK(s.return_annual <= prev);
      prev = s.return_annual;
    }
  }

  TEST_CASE("group: 78 assets form 6 columns of 13; sharpe weights sum to 1") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 78, 9);
    c.n_trials = 1;
    cmd_group(c, RankMetric::risk);
    const auto rows = read_csv(c.out_dir / "groups_risk.csv");
    REQUIRE(rows.size() == 14);
    for (const auto& r : rows) CHECK(r.size() == 7);

    cmd_group(c, RankMetric::sharpe);
    const auto w = read_csv(c.out_dir / "weights_sharpe.csv");
    REQUIRE(w.size() == 1 + 78);
    std::map<std::string, double> sums;
    for (std::size_t i = 1; i < w.size(); ++i) sums[w[i][0]] += std::stod(w[i][2]);
    CHECK(sums.size() == 6);
    for (const auto& [g, s] : sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));

    c.group_size = 12;
    CHECK_THROWS_AS(cmd_group(c, RankMetric::risk), UsageError);
  }

  TEST_CASE("simulate: perfectly forecastable asset scores zero MAPE") {
    TempDir dir;
    auto c = small_config(dir);
    std::vector<double> p;
    for (std::size_t k = 0; k < kDays.size(); ++k) p.push_back(20.0 * std::exp(0.0007 * k));
    testsupport::write_price_csv(c.data_dir / "EXP.csv", kDays, p);
    cmd_simulate_evaluate(c, "EXP");
    const auto rows = read_csv(c.out_dir / "eval_EXP.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"horizon", "mean_correlation", "mape", "band"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(std::stod(rows[i][2]) < 1e-12);
      CHECK(rows[i][3] == "high");
    }
    const auto env = read_csv(c.out_dir / "envelope_EXP.csv");
    REQUIRE(env.size() == 1 + 248);
    CHECK(env[0] == std::vector<std::string>{"day_index", "date", "actual", "mean", "q05", "q95"});
    CHECK(env[1][1] == "2018-12-31");
    CHECK(env[2][1] == "2019-01-01");
  }

  TEST_CASE("simulate is deterministic and writes summaries for 'all'") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 6, 11);
    const auto first = cmd_simulate_evaluate(c, "all");
    std::map<std::string, std::string> contents;
    for (const auto& f : first) contents[f.string()] = read_text(c.out_dir / f);

    c.out_dir = dir.path() / "out2";
    const auto second = cmd_simulate_evaluate(c, "all");
    REQUIRE(first == second);
    for (const auto& f : second) CHECK(read_text(c.out_dir / f) == contents[f.string()]);

    int eval_files = 0;
    for (const auto& f : first) {
      if (f.string().starts_with("eval_") && f.extension() == ".csv") ++eval_files;
    }
    CHECK(eval_files == 6);
    const auto summary = read_csv(c.out_dir / "summary_all.csv");
    REQUIRE(summary.size() == 1 + 6 + 1);
    CHECK(summary.back()[0] == "mean");
    CHECK(summary[0].size() == 11);
  }

  TEST_CASE("simulate portfolios and error paths") {
    TempDir dir;
    auto c = small_config(dir);
    write_universe(c.data_dir, 6, 13);
    c.group_count = 2;
    c.group_size = 3;
    const auto out = cmd_simulate_evaluate(c, "sharpe-2");
    CHECK(std::filesystem::exists(c.out_dir / "eval_sharpe-2.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "envelope_sharpe-2.csv"));
    cmd_simulate_evaluate(c, "all-return");
    CHECK(read_csv(c.out_dir / "summary_all-return.csv").size() == 1 + 2 + 1);

    CHECK_THROWS_AS(cmd_simulate_evaluate(c, "NOPE"), DataError);
    CHECK_THROWS_AS(cmd_simulate_evaluate(c, "risk-3"), UsageError);

    c.evaluation_end = Date(2019, 6, 30);
    CHECK_THROWS_AS(cmd_simulate_evaluate(c, "A00"), DataError);
  }

  TEST_CASE("synthetic universe loads and aligns") {
    TempDir dir;
    write_synthetic_universe(dir.path(), 5, 1);
    const auto s = load_csv(dir.path() / "SYN01.csv", "SYN01");
    CHECK(s.dates().front() == Date(2016, 1, 4));
    CHECK(s.dates().back() == Date(2019, 12, 31));
    CHECK(std::filesystem::exists(dir.path() / "SYN05.csv"));
  }
}
