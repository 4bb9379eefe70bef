#include "gbmfolio/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "gbmfolio/errors.hpp"

namespace gbmfolio {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

// "Adj Close", "adj_close", "AdjClose" all map to "adjclose".
std::string header_key(std::string_view cell) {
  std::string key;
  for (char c : cell) {
    if (c == ' ' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

void check_series(const std::string& ticker, const std::vector<Date>& dates,
                  const std::vector<double>& prices) {
  if (dates.size() != prices.size()) {
    throw DataError(ticker + ": dates and prices differ in length");
  }
  if (prices.size() < 2) throw DataError(ticker + ": insufficient data (need at least 2 prices)");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!std::isfinite(prices[i]) || prices[i] <= 0.0) {
      throw DataError(ticker + ": non-positive or non-finite price on " + dates[i].to_string());
    }
    if (i > 0 && !(dates[i - 1] < dates[i])) {
      throw DataError(ticker + ": dates not strictly increasing at " + dates[i].to_string());
    }
  }
}

}  // namespace

PriceSeries::PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> prices)
    : ticker_(std::move(ticker)), dates_(std::move(dates)), prices_(std::move(prices)) {
  check_series(ticker_, dates_, prices_);
}

PriceSeries PriceSeries::with_ticker(std::string ticker) const {
  PriceSeries copy = *this;
  copy.ticker_ = std::move(ticker);
  return copy;
}

PricePanel::PricePanel(std::vector<std::string> tickers, std::vector<Date> dates,
                       std::vector<double> matrix)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), matrix_(std::move(matrix)) {
  if (tickers_.empty()) throw DataError("panel has no assets");
  if (matrix_.size() != tickers_.size() * dates_.size()) {
    throw DataError("panel matrix size does not match dates x tickers");
  }
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) throw DataError("panel dates not strictly increasing");
  }
  for (double p : matrix_) {
    if (!std::isfinite(p) || p <= 0.0) throw DataError("panel contains a non-positive price");
  }
}

PriceSeries PricePanel::column(std::size_t asset_index) const {
  std::vector<double> prices(dates_.size());
  for (std::size_t t = 0; t < dates_.size(); ++t) prices[t] = at(t, asset_index);
  return PriceSeries(tickers_.at(asset_index), dates_, std::move(prices));
}

PricePanel PricePanel::select(std::span<const std::size_t> asset_indices) const {
  std::vector<std::string> tickers;
  for (auto j : asset_indices) tickers.push_back(tickers_.at(j));
  std::vector<double> matrix;
  matrix.reserve(asset_indices.size() * dates_.size());
  for (std::size_t t = 0; t < dates_.size(); ++t) {
    for (auto j : asset_indices) matrix.push_back(at(t, j));
  }
  return PricePanel(std::move(tickers), dates_, std::move(matrix));
}

PriceSeries load_csv(const std::filesystem::path& path, const std::string& ticker,
                     std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  const auto header = split_commas(line);
  std::ptrdiff_t date_col = -1, price_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto key = header_key(header[i]);
    if (key == "date") date_col = static_cast<std::ptrdiff_t>(i);
    if (key == "adjclose") price_col = static_cast<std::ptrdiff_t>(i);
  }
  if (date_col < 0 || price_col < 0) {
    throw DataError(path.string() + ": malformed header (need Date and Adj Close columns)");
  }
  const auto needed = static_cast<std::size_t>(std::max(date_col, price_col));

  std::vector<std::pair<Date, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() <= needed) continue;
    double price = 0.0;
    if (!parse_double(cells[static_cast<std::size_t>(price_col)], price) || !std::isfinite(price)) {
      continue;
    }
    const Date date = Date::parse(cells[static_cast<std::size_t>(date_col)]);
    if (price <= 0.0) {
      if (warnings) {
        warnings->push_back(ticker + ": dropped non-positive price on " + date.to_string() +
                            " (line " + std::to_string(line_no) + ")");
      }
      continue;
    }
    rows.emplace_back(date, price);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw DataError(path.string() + ": duplicate date " + rows[i].first.to_string());
    }
  }
  if (rows.size() < 2) {
    throw DataError(path.string() + ": insufficient data (" + std::to_string(rows.size()) +
                    " valid rows)");
  }

  std::vector<Date> dates;
  std::vector<double> prices;
  dates.reserve(rows.size());
  prices.reserve(rows.size());
  for (auto& [d, p] : rows) {
    dates.push_back(d);
    prices.push_back(p);
  }
  return PriceSeries(ticker, std::move(dates), std::move(prices));
}

PricePanel align_panel(std::span<const PriceSeries> series) {
  if (series.empty()) throw DataError("align_panel needs at least one series");

  std::vector<Date> common = series.front().dates();
  for (const auto& s : series.subspan(1)) {
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), s.dates().begin(), s.dates().end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw DataError("no common dates");

  std::vector<std::string> tickers;
  std::vector<double> matrix(common.size() * series.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    const auto& s = series[j];
    tickers.push_back(s.ticker());
    std::size_t k = 0;
    for (std::size_t t = 0; t < common.size(); ++t) {
      while (s.dates()[k] < common[t]) ++k;
      matrix[t * series.size() + j] = s.prices()[k];
    }
  }
  return PricePanel(std::move(tickers), std::move(common), std::move(matrix));
}

PriceSeries normalize_base100(const PriceSeries& series) {
  const double base = series.front();
  std::vector<double> prices(series.size());
  prices[0] = 100.0;
  for (std::size_t i = 1; i < series.size(); ++i) prices[i] = series.prices()[i] / base * 100.0;
  return PriceSeries(series.ticker(), series.dates(), std::move(prices));
}

PriceSeries slice_period(const PriceSeries& series, const Date& start, const Date& end) {
  if (end < start) throw UsageError("slice_period: start after end");
  std::vector<Date> dates;
  std::vector<double> prices;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& d = series.dates()[i];
    if (start <= d && d <= end) {
      dates.push_back(d);
      prices.push_back(series.prices()[i]);
    }
  }
  if (dates.size() < 2) {
    throw DataError(series.ticker() + ": window " + start.to_string() + ".." + end.to_string() +
                    " holds fewer than 2 prices");
  }
  return PriceSeries(series.ticker(), std::move(dates), std::move(prices));
}

PricePanel slice_period(const PricePanel& panel, const Date& start, const Date& end) {
  if (end < start) throw UsageError("slice_period: start after end");
  std::vector<Date> dates;
  std::vector<double> matrix;
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    const auto& d = panel.dates()[t];
    if (start <= d && d <= end) {
      dates.push_back(d);
      auto row = panel.row(t);
      matrix.insert(matrix.end(), row.begin(), row.end());
    }
  }
  if (dates.size() < 2) throw DataError("panel window holds fewer than 2 dates");
  return PricePanel(panel.tickers(), std::move(dates), std::move(matrix));
}

}  // namespace gbmfolio
