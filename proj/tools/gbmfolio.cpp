// Command-line front end for the simulation and evaluation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gbmfolio/errors.hpp"
#include "gbmfolio/report.hpp"

namespace {

using gbmfolio::report::RunConfig;

struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> data_dir;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> trials;
  std::optional<double> risk_free;
  std::optional<std::string> horizons;
  std::optional<std::string> tickers;
  std::optional<unsigned> threads;
  std::optional<std::string> mape_denominator;
};

void add_common_flags(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_file, "Flat key = value config file");
  app.add_option("--data-dir", o.data_dir, "Directory of <TICKER>.csv price files");
  app.add_option("--out-dir", o.out_dir, "Output directory");
  app.add_option("--seed", o.seed, "Master random seed");
  app.add_option("--paths", o.paths, "GBM paths per subject");
  app.add_option("--trials", o.trials, "Random portfolios per max-Sharpe search");
  app.add_option("--risk-free", o.risk_free, "Annual risk-free rate (fraction)");
  app.add_option("--horizons", o.horizons, "e.g. 1w,2w,1m,6m,1y or label=days");
  app.add_option("--tickers", o.tickers, "Comma-separated tickers (default: all files)");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_option("--mape-denominator", o.mape_denominator, "forecast (default) or actual");
}

RunConfig resolve(const Overrides& o) {
  RunConfig config;
  if (o.config_file) gbmfolio::report::load_config_file(*o.config_file, config);
  auto set = [&](const char* key, const auto& value) {
    if (value) {
      if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, std::string>) {
        gbmfolio::report::apply_setting(config, key, *value);
      } else {
        gbmfolio::report::apply_setting(config, key, std::to_string(*value));
      }
    }
  };
  set("data_dir", o.data_dir);
  set("out_dir", o.out_dir);
  set("seed", o.seed);
  set("n_paths", o.paths);
  set("n_trials", o.trials);
  set("horizons", o.horizons);
  set("tickers", o.tickers);
  set("threads", o.threads);
  set("mape_denominator", o.mape_denominator);
  if (o.risk_free) config.risk_free = *o.risk_free;
  config.validate();
  return config;
}

void print_outputs(const RunConfig& config, const gbmfolio::report::OutputList& outputs) {
  for (const auto& f : outputs) std::cout << (config.out_dir / f).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GBM price simulation, portfolio construction and forecast evaluation"};
  app.require_subcommand(1);
  Overrides o;

  auto* stats = app.add_subcommand("stats", "Annual return, risk and Sharpe per ticker");
  add_common_flags(*stats, o);

  std::string metric;
  auto* group = app.add_subcommand("group", "Rank tickers and form portfolios");
  add_common_flags(*group, o);
  group->add_option("--metric", metric, "return | risk | sharpe")
      ->required()
      ->check(CLI::IsMember({"return", "risk", "sharpe"}));

  std::string subject;
  auto* simulate = app.add_subcommand("simulate", "Simulate and score a ticker or portfolio");
  add_common_flags(*simulate, o);
  simulate->add_option("--subject", subject, "TICKER, <metric>-<n>, all, or all-<metric>")
      ->required();

  auto* report = app.add_subcommand("report", "Run the whole pipeline");
  add_common_flags(*report, o);

  std::string synth_out;
  std::size_t synth_assets = 78;
  std::uint64_t synth_seed = 2019;
  auto* synth = app.add_subcommand("synth", "Write a synthetic price universe");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--assets", synth_assets, "Number of assets");
  synth->add_option("--seed", synth_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      gbmfolio::report::write_synthetic_universe(synth_out, synth_assets, synth_seed);
      return 0;
    }
    const auto config = resolve(o);
    gbmfolio::report::OutputList outputs;
    if (stats->parsed()) {
      outputs = gbmfolio::report::cmd_stats(config);
    } else if (group->parsed()) {
      outputs = gbmfolio::report::cmd_group(config, gbmfolio::parse_rank_metric(metric));
    } else if (simulate->parsed()) {
      outputs = gbmfolio::report::cmd_simulate_evaluate(config, subject);
    } else if (report->parsed()) {
      outputs = gbmfolio::report::cmd_report(config);
    }
    print_outputs(config, outputs);
  } catch (const gbmfolio::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const gbmfolio::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const gbmfolio::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
