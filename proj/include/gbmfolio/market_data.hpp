#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gbmfolio/date.hpp"

namespace gbmfolio {

/// Trading-day conventions used throughout the toolkit.
struct TradingCalendar {
  static constexpr int days_per_year = 252;
  static constexpr int week = 5;
  static constexpr int two_weeks = 10;
  static constexpr int month = 21;
  static constexpr int six_months = 126;
  static constexpr int year = 247;
};

/// One asset's dated daily closing prices.
///
/// Invariants (checked on construction, DataError otherwise): dates strictly
/// increasing, every price finite and > 0, at least two observations.
class PriceSeries {
public:
  PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> prices);

  const std::string& ticker() const { return ticker_; }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<double>& prices() const { return prices_; }
  std::size_t size() const { return prices_.size(); }
  double front() const { return prices_.front(); }
  double back() const { return prices_.back(); }

  PriceSeries with_ticker(std::string ticker) const;

private:
  std::string ticker_;
  std::vector<Date> dates_;
  std::vector<double> prices_;
};

/// Several price series on a shared date axis, stored row-major (date, ticker).
class PricePanel {
public:
  PricePanel(std::vector<std::string> tickers, std::vector<Date> dates, std::vector<double> matrix);

  const std::vector<std::string>& tickers() const { return tickers_; }
  const std::vector<Date>& dates() const { return dates_; }
  std::size_t num_assets() const { return tickers_.size(); }
  std::size_t num_dates() const { return dates_.size(); }

  double at(std::size_t date_index, std::size_t asset_index) const {
    return matrix_[date_index * tickers_.size() + asset_index];
  }
  std::span<const double> row(std::size_t date_index) const {
    return {matrix_.data() + date_index * tickers_.size(), tickers_.size()};
  }

  PriceSeries column(std::size_t asset_index) const;
  /// Sub-panel with the given asset indices, in the given order.
  PricePanel select(std::span<const std::size_t> asset_indices) const;

private:
  std::vector<std::string> tickers_;
  std::vector<Date> dates_;
  std::vector<double> matrix_;
};

/// Reads a daily-export CSV (Date, Open, High, Low, Close, Adj Close, Volume)
/// and returns the adjusted-close series sorted by date.
///
/// Rows whose price cell is empty or non-numeric are dropped silently; rows
/// with a non-positive price are dropped and reported through `warnings`.
/// Throws DataError for a missing file, a header without Date / Adj Close,
/// duplicate dates, or fewer than two usable rows.
PriceSeries load_csv(const std::filesystem::path& path, const std::string& ticker,
                     std::vector<std::string>* warnings = nullptr);

/// Inner join of the inputs on date. Columns keep input order.
PricePanel align_panel(std::span<const PriceSeries> series);

/// Divides by the first price and multiplies by 100.
PriceSeries normalize_base100(const PriceSeries& series);

/// Rows with start <= date <= end. Throws DataError if fewer than 2 remain.
PriceSeries slice_period(const PriceSeries& series, const Date& start, const Date& end);
PricePanel slice_period(const PricePanel& panel, const Date& start, const Date& end);

}  // namespace gbmfolio
