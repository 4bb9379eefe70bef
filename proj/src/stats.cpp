#include "gbmfolio/stats.hpp"

#include <cmath>

#include "gbmfolio/errors.hpp"

namespace gbmfolio {

namespace {

const double kSqrtDaysPerYear = std::sqrt(static_cast<double>(TradingCalendar::days_per_year));

ReturnSeries returns_of(const PriceSeries& series, ReturnKind kind) {
  ReturnSeries out;
  out.kind = kind;
  const auto& p = series.prices();
  out.dates.assign(series.dates().begin() + 1, series.dates().end());
  out.values.resize(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    out.values[i] = kind == ReturnKind::log ? std::log(p[i + 1] / p[i]) : p[i + 1] / p[i] - 1.0;
  }
  return out;
}

}  // namespace

ReturnSeries simple_returns(const PriceSeries& series) {
  return returns_of(series, ReturnKind::simple);
}

ReturnSeries log_returns(const PriceSeries& series) { return returns_of(series, ReturnKind::log); }

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of empty series");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw DataError("sample variance needs at least 2 values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

double sample_stddev(std::span<const double> values) {
  const double sd = std::sqrt(sample_variance(values));
  return sd < kVolatilityNoiseFloor ? 0.0 : sd;
}

double annualize_return(const ReturnSeries& returns) {
  if (returns.kind != ReturnKind::log) {
    throw UsageError("annualize_return expects log returns");
  }
  if (returns.values.empty()) throw DataError("annualize_return: empty return series");
  return mean(returns.values) * TradingCalendar::days_per_year;
}

double annualize_risk(const ReturnSeries& returns) {
  if (returns.values.size() < 2) throw DataError("annualize_risk: need at least 2 returns");
  return sample_stddev(returns.values) * kSqrtDaysPerYear;
}

double sharpe_ratio(double return_annual, double risk_annual, double risk_free) {
  if (!(risk_annual > 0.0)) throw NumericError("undefined Sharpe (risk is zero)");
  return (return_annual - risk_free) / risk_annual;
}

AssetStats asset_stats(const PriceSeries& series, double risk_free) {
  const auto r = log_returns(series);
  AssetStats s;
  s.mu_daily = mean(r.values);
  s.sigma_daily = r.values.size() >= 2 ? sample_stddev(r.values) : 0.0;
  s.return_annual = s.mu_daily * TradingCalendar::days_per_year;
  s.risk_annual = s.sigma_daily * kSqrtDaysPerYear;
  if (s.risk_annual > 0.0) s.sharpe = (s.return_annual - risk_free) / s.risk_annual;
  return s;
}

}  // namespace gbmfolio
