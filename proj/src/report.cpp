#include "gbmfolio/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "gbmfolio/errors.hpp"
#include "gbmfolio/gbm.hpp"
#include "gbmfolio/market_data.hpp"
#include "gbmfolio/random.hpp"
#include "gbmfolio/stats.hpp"
#include "json.hpp"

namespace gbmfolio::report {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kCapitalPerAsset = 100.0;
constexpr double kEnvelopeLower = 0.05;
constexpr double kEnvelopeUpper = 0.95;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("config: bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::string sha256_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string horizons_to_string(const std::vector<HorizonSpec>& horizons) {
  std::string out;
  for (const auto& h : horizons) {
    if (!out.empty()) out += ',';
    out += h.label + "=" + std::to_string(h.days);
  }
  return out;
}

json config_json(const RunConfig& c) {
  json tickers = json::array();
  for (const auto& t : c.tickers) tickers.push_back(t);
  return json{{"data_dir", c.data_dir.generic_string()},
              {"calibration_start", c.calibration_start.to_string()},
              {"calibration_end", c.calibration_end.to_string()},
              {"evaluation_start", c.evaluation_start.to_string()},
              {"evaluation_end", c.evaluation_end.to_string()},
              {"risk_free", c.risk_free},
              {"n_paths", c.n_paths},
              {"n_trials", c.n_trials},
              {"seed", c.seed},
              {"group_count", c.group_count},
              {"group_size", c.group_size},
              {"horizons", horizons_to_string(c.horizons)},
              {"mape_denominator",
               c.mape_denominator == MapeDenominator::forecast ? "forecast" : "actual"},
              {"tickers", tickers}};
}

/// Minimal CSV builder; every cell is written verbatim.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Writes `name` under out_dir and a `<name>.json` sidecar carrying the
/// command, config and a content hash.
void emit(const RunConfig& config, OutputList& outputs, const std::string& name,
          const std::string& content, const std::string& command, const json& extra = {}) {
  write_file(config.out_dir / name, content);
  json sidecar{{"file", name},
               {"command", command},
               {"config", config_json(config)},
               {"sha256", sha256_hex(content)}};
  if (!extra.is_null()) sidecar["details"] = extra;
  write_file(config.out_dir / (name + ".json"), sidecar.dump(2) + "\n");
  outputs.push_back(name);
  outputs.push_back(name + ".json");
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("NA");
}

std::vector<std::string> universe_tickers(const RunConfig& config) {
  if (!config.tickers.empty()) return config.tickers;
  if (!fs::is_directory(config.data_dir)) {
    throw DataError("data directory not found: " + config.data_dir.string());
  }
  std::vector<std::string> tickers;
  for (const auto& entry : fs::directory_iterator(config.data_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      tickers.push_back(entry.path().stem().string());
    }
  }
  std::sort(tickers.begin(), tickers.end());
  return tickers;
}

PriceSeries load_ticker(const RunConfig& config, const std::string& ticker) {
  std::vector<std::string> warnings;
  auto series = load_csv(config.data_dir / (ticker + ".csv"), ticker, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return series;
}

struct SubjectData {
  std::string id;
  PriceSeries series;  // covers calibration start .. evaluation end
};

struct SubjectResult {
  EvalReport report;
  std::string eval_csv;
  std::string envelope_csv;
};

/// Lazily loaded universe and groupings shared by the commands of one run.
class Pipeline {
public:
  explicit Pipeline(const RunConfig& config) : config_(config) { config_.validate(); }

  const RunConfig& config() const { return config_; }

  const PricePanel& universe() {
    if (!universe_) {
      std::vector<PriceSeries> series;
      for (const auto& t : universe_tickers(config_)) series.push_back(load_ticker(config_, t));
      if (series.empty()) throw DataError("no price files in " + config_.data_dir.string());
      universe_ = std::make_unique<PricePanel>(slice_period(
          align_panel(series), config_.calibration_start, config_.evaluation_end));
    }
    return *universe_;
  }

  PricePanel calibration_panel() {
    return slice_period(universe(), config_.calibration_start, config_.calibration_end);
  }

  const PortfolioGroup& grouping(RankMetric metric) {
    auto it = groupings_.find(metric);
    if (it == groupings_.end()) {
      it = groupings_
               .emplace(metric, rank_and_group(calibration_panel(), metric, config_.risk_free,
                                               config_.group_count, config_.group_size))
               .first;
    }
    return it->second;
  }

  std::vector<std::size_t> group_columns(RankMetric metric, std::size_t g) {
    const auto& grouping_ = grouping(metric);
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < config_.group_size; ++k) {
      cols.push_back(grouping_.ranking[g * config_.group_size + k].column);
    }
    return cols;
  }

  /// Equal weights, or max-Sharpe weights for the sharpe grouping.
  const Weights& group_weights(RankMetric metric, std::size_t g) {
    const auto key = std::make_pair(metric, g);
    auto it = weights_.find(key);
    if (it == weights_.end()) {
      const auto cols = group_columns(metric, g);
      if (metric == RankMetric::sharpe) {
        const auto id = group_id(metric, g);
        auto result = optimize_max_sharpe(calibration_panel().select(cols), config_.n_trials,
                                          derive_seed(config_.seed, stable_hash("optimize:" + id)),
                                          config_.risk_free, config_.threads);
        it = weights_.emplace(key, std::move(result.weights)).first;
      } else {
        it = weights_.emplace(key, Weights::equal(cols.size())).first;
      }
    }
    return it->second;
  }

  static std::string group_id(RankMetric metric, std::size_t g) {
    return std::string(to_string(metric)) + "-" + std::to_string(g + 1);
  }

  SubjectData subject(std::string_view id) {
    const auto& u = universe();
    for (std::size_t j = 0; j < u.num_assets(); ++j) {
      if (u.tickers()[j] == id) return {std::string(id), u.column(j)};
    }
    const auto dash = id.rfind('-');
    if (dash != std::string_view::npos) {
      const auto metric = parse_rank_metric(id.substr(0, dash));
      const auto number = parse_number<std::size_t>("group", id.substr(dash + 1));
      if (number == 0 || number > config_.group_count) {
        throw UsageError("group number out of range in '" + std::string(id) + "'");
      }
      const std::size_t g = number - 1;
      const auto cols = group_columns(metric, g);
      const auto& w = group_weights(metric, g);
      const double capital = kCapitalPerAsset * static_cast<double>(cols.size());
      return {std::string(id), portfolio_value_series(u.select(cols), w, capital, std::string(id))};
    }
    throw DataError("unknown subject '" + std::string(id) + "'");
  }

  SubjectResult simulate(const SubjectData& s) {
    const auto calib = slice_period(s.series, config_.calibration_start, config_.calibration_end);
    const auto eval = slice_period(s.series, config_.evaluation_start, config_.evaluation_end);

    std::size_t max_h = 0;
    for (const auto& h : config_.horizons) max_h = std::max(max_h, h.days);
    if (eval.size() < max_h) {
      throw DataError(s.id + ": evaluation window has " + std::to_string(eval.size()) +
                      " prices, need " + std::to_string(max_h));
    }

    // Day 0 is the last calibration close; days 1.. are the evaluation window.
    std::vector<double> actual{calib.back()};
    std::vector<Date> dates{calib.dates().back()};
    actual.insert(actual.end(), eval.prices().begin(), eval.prices().end());
    dates.insert(dates.end(), eval.dates().begin(), eval.dates().end());

    SimulationConfig sim{config_.n_paths, max_h, derive_seed(config_.seed, stable_hash(s.id))};
    const auto paths = simulate_ensemble(calibrate(calib), sim, config_.threads);
    auto report = evaluate_ensemble(paths, actual, config_.horizons, s.id, config_.mape_denominator);
    const auto env = envelope(paths, kEnvelopeLower, kEnvelopeUpper);

    CsvTable eval_table({"horizon", "mean_correlation", "mape", "band"});
    for (const auto& h : report.horizons) {
      eval_table.add_row({h.horizon.label, optional_number(h.mean_correlation), format_number(h.mape),
                          std::string(to_string(h.band))});
    }
    CsvTable env_table({"day_index", "date", "actual", "mean", "q05", "q95"});
    for (std::size_t k = 0; k <= max_h; ++k) {
      env_table.add_row({std::to_string(k), dates[k].to_string(), format_number(actual[k]),
                         format_number(env.mean[k]), format_number(env.lower[k]),
                         format_number(env.upper[k])});
    }
    return {std::move(report), eval_table.str(), env_table.str()};
  }

private:
  RunConfig config_;
  std::unique_ptr<PricePanel> universe_;
  std::map<RankMetric, PortfolioGroup> groupings_;
  std::map<std::pair<RankMetric, std::size_t>, Weights> weights_;
};

void emit_subject(const RunConfig& config, OutputList& outputs, const SubjectResult& r,
                  const std::string& command) {
  const json details{{"subject", r.report.subject}};
  emit(config, outputs, "eval_" + r.report.subject + ".csv", r.eval_csv, command, details);
  emit(config, outputs, "envelope_" + r.report.subject + ".csv", r.envelope_csv, command, details);
}

/// One row per subject plus a final "mean" row.
std::string summary_csv(const RunConfig& config, const std::vector<EvalReport>& reports) {
  std::vector<std::string> header{"subject"};
  for (const auto& h : config.horizons) header.push_back("corr_" + h.label);
  for (const auto& h : config.horizons) header.push_back("mape_" + h.label);
  CsvTable table(header);

  const std::size_t n_h = config.horizons.size();
  std::vector<double> corr_sum(n_h, 0.0), mape_sum(n_h, 0.0);
  std::vector<std::size_t> corr_n(n_h, 0);
  for (const auto& r : reports) {
    std::vector<std::string> row{r.subject};
    for (std::size_t k = 0; k < n_h; ++k) {
      row.push_back(optional_number(r.horizons[k].mean_correlation));
      if (r.horizons[k].mean_correlation) {
        corr_sum[k] += *r.horizons[k].mean_correlation;
        ++corr_n[k];
      }
    }
    for (std::size_t k = 0; k < n_h; ++k) {
      row.push_back(format_number(r.horizons[k].mape));
      mape_sum[k] += r.horizons[k].mape;
    }
    table.add_row(std::move(row));
  }
  if (!reports.empty()) {
    std::vector<std::string> row{"mean"};
    for (std::size_t k = 0; k < n_h; ++k) {
      row.push_back(corr_n[k] ? format_number(corr_sum[k] / static_cast<double>(corr_n[k])) : "NA");
    }
    for (std::size_t k = 0; k < n_h; ++k) {
      row.push_back(format_number(mape_sum[k] / static_cast<double>(reports.size())));
    }
    table.add_row(std::move(row));
  }
  return table.str();
}

OutputList stats_impl(Pipeline& p) {
  const auto& config = p.config();
  CsvTable table({"ticker", "return_annual", "risk_annual", "sharpe"});
  std::ostringstream text;
  char line[128];
  std::snprintf(line, sizeof(line), "%-12s %14s %14s %10s\n", "ticker", "return_annual",
                "risk_annual", "sharpe");
  text << line;
  for (const auto& ticker : universe_tickers(config)) {
    const auto series =
        slice_period(load_ticker(config, ticker), config.calibration_start, config.calibration_end);
    const auto s = asset_stats(series, config.risk_free);
    table.add_row({ticker, format_number(s.return_annual), format_number(s.risk_annual),
                   optional_number(s.sharpe)});
    std::snprintf(line, sizeof(line), "%-12s %14.6f %14.6f %10s\n", ticker.c_str(),
                  s.return_annual, s.risk_annual,
                  s.sharpe ? std::to_string(*s.sharpe).c_str() : "NA");
    text << line;
  }
  OutputList outputs;
  emit(config, outputs, "stats.csv", table.str(), "stats");
  write_file(config.out_dir / "stats.txt", text.str());
  outputs.push_back("stats.txt");
  return outputs;
}

OutputList group_impl(Pipeline& p, RankMetric metric) {
  const auto& config = p.config();
  const auto& grouping = p.grouping(metric);
  const std::string m(to_string(metric));

  std::vector<std::string> header{"rank"};
  for (std::size_t g = 0; g < config.group_count; ++g) header.push_back(Pipeline::group_id(metric, g));
  CsvTable members(header);
  for (std::size_t k = 0; k < config.group_size; ++k) {
    std::vector<std::string> row{std::to_string(k + 1)};
    for (std::size_t g = 0; g < config.group_count; ++g) row.push_back(grouping.groups[g][k]);
    members.add_row(std::move(row));
  }
  OutputList outputs;
  emit(config, outputs, "groups_" + m + ".csv", members.str(), "group --metric " + m);

  if (metric == RankMetric::sharpe) {
    CsvTable weights({"group", "ticker", "weight"});
    for (std::size_t g = 0; g < config.group_count; ++g) {
      const auto& w = p.group_weights(metric, g);
      for (std::size_t k = 0; k < config.group_size; ++k) {
        weights.add_row({Pipeline::group_id(metric, g), grouping.groups[g][k], format_number(w[k])});
      }
    }
    emit(config, outputs, "weights_sharpe.csv", weights.str(), "group --metric sharpe");
  }
  return outputs;
}

OutputList simulate_impl(Pipeline& p, std::string_view subject) {
  const auto& config = p.config();
  const std::string command = "simulate --subject " + std::string(subject);
  std::vector<std::string> ids;
  bool summary = true;
  if (subject == "all") {
    ids = p.universe().tickers();
  } else if (subject.starts_with("all-")) {
    const auto metric = parse_rank_metric(subject.substr(4));
    for (std::size_t g = 0; g < config.group_count; ++g) ids.push_back(Pipeline::group_id(metric, g));
  } else {
    ids.emplace_back(subject);
    summary = false;
  }

  OutputList outputs;
  std::vector<EvalReport> reports;
  for (const auto& id : ids) {
    auto result = p.simulate(p.subject(id));
    emit_subject(config, outputs, result, command);
    reports.push_back(std::move(result.report));
  }
  if (summary) {
    emit(config, outputs, "summary_" + std::string(subject) + ".csv", summary_csv(config, reports),
         command);
  }
  return outputs;
}

}  // namespace

void RunConfig::validate() const {
  if (!(calibration_start <= calibration_end)) throw UsageError("calibration window is empty");
  if (!(evaluation_start <= evaluation_end)) throw UsageError("evaluation window is empty");
  if (!(calibration_end < evaluation_start)) {
    throw UsageError("calibration window must end before the evaluation window starts");
  }
  if (n_paths == 0) throw UsageError("n_paths must be >= 1");
  if (n_trials == 0) throw UsageError("n_trials must be >= 1");
  if (group_count == 0 || group_size == 0) throw UsageError("group count and size must be >= 1");
  if (horizons.empty()) throw UsageError("no horizons configured");
  if (!std::isfinite(risk_free)) throw UsageError("risk_free must be finite");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "data_dir") c.data_dir = std::string(value);
  else if (key == "out_dir") c.out_dir = std::string(value);
  else if (key == "calibration_start") c.calibration_start = Date::parse(value);
  else if (key == "calibration_end") c.calibration_end = Date::parse(value);
  else if (key == "evaluation_start") c.evaluation_start = Date::parse(value);
  else if (key == "evaluation_end") c.evaluation_end = Date::parse(value);
  else if (key == "risk_free") c.risk_free = parse_number<double>(key, value);
  else if (key == "n_paths") c.n_paths = parse_number<std::size_t>(key, value);
  else if (key == "n_trials") c.n_trials = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "group_count") c.group_count = parse_number<std::size_t>(key, value);
  else if (key == "group_size") c.group_size = parse_number<std::size_t>(key, value);
  else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
  else if (key == "horizons") c.horizons = parse_horizons(value);
  else if (key == "mape_denominator") {
    if (value == "forecast") c.mape_denominator = MapeDenominator::forecast;
    else if (value == "actual") c.mape_denominator = MapeDenominator::actual;
    else throw UsageError("mape_denominator must be 'forecast' or 'actual'");
  } else if (key == "tickers") {
    c.tickers.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (!item.empty()) c.tickers.emplace_back(item);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void load_config_file(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
  }
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

OutputList cmd_stats(const RunConfig& config) {
  Pipeline p(config);
  return stats_impl(p);
}

OutputList cmd_group(const RunConfig& config, RankMetric metric) {
  Pipeline p(config);
  return group_impl(p, metric);
}

OutputList cmd_simulate_evaluate(const RunConfig& config, std::string_view subject) {
  Pipeline p(config);
  return simulate_impl(p, subject);
}

OutputList cmd_report(const RunConfig& config) {
  Pipeline p(config);
  OutputList outputs = stats_impl(p);
  auto append = [&](OutputList more) { outputs.insert(outputs.end(), more.begin(), more.end()); };
  for (auto metric : {RankMetric::return_annual, RankMetric::risk, RankMetric::sharpe}) {
    append(group_impl(p, metric));
  }
  append(simulate_impl(p, "all"));
  for (auto metric : {RankMetric::return_annual, RankMetric::risk, RankMetric::sharpe}) {
    append(simulate_impl(p, "all-" + std::string(to_string(metric))));
  }
  return outputs;
}

void write_synthetic_universe(const fs::path& dir, std::size_t n_assets, std::uint64_t seed,
                              Date start, Date end) {
  if (end < start) throw UsageError("synthetic universe: start after end");
  std::vector<Date> days;
  for (Date d = start; d <= end; d = d.next_day()) {
    if (d.weekday_index() < 5) days.push_back(d);
  }
  if (days.size() < 2) throw UsageError("synthetic universe: fewer than 2 trading days");

  const int width = n_assets >= 100 ? 3 : 2;
  for (std::size_t a = 0; a < n_assets; ++a) {
    RandomStream draw(seed, 2 * a);
    GbmParams params;
    params.s0 = 5.0 + 45.0 * draw.uniform();
    params.mu = -0.0006 + 0.0022 * draw.uniform();
    params.sigma = 0.008 + 0.027 * draw.uniform();
    RandomStream noise(seed, 2 * a + 1);
    const auto path = gbm_path(params, days.size() - 1, noise);

    char ticker[32];
    std::snprintf(ticker, sizeof(ticker), "SYN%0*zu", width, a + 1);
    std::string content = "Date,Open,High,Low,Close,Adj Close,Volume\n";
    char row[160];
    for (std::size_t t = 0; t < days.size(); ++t) {
      const double p = path[t];
      const double open = t ? path[t - 1] : p;
      std::snprintf(row, sizeof(row), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%zu\n",
                    days[t].to_string().c_str(), open, std::max(open, p) * 1.005,
                    std::min(open, p) * 0.995, p, p, 100000 + (a * 7919 + t * 104729) % 900000);
      content += row;
    }
    write_file(dir / (std::string(ticker) + ".csv"), content);
  }
}

}  // namespace gbmfolio::report
