#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gbmfolio/date.hpp"
#include "gbmfolio/market_data.hpp"

namespace gbmfolio {

inline constexpr double kDefaultRiskFree = 0.019;

enum class ReturnKind { simple, log };

/// Per-day returns; dates[i] is the later day of the pair (i, i+1).
struct ReturnSeries {
  std::vector<Date> dates;
  std::vector<double> values;
  ReturnKind kind = ReturnKind::log;
};

struct AssetStats {
  double mu_daily = 0.0;     // mean daily log return
  double sigma_daily = 0.0;  // sample std of daily log returns
  double return_annual = 0.0;
  double risk_annual = 0.0;
  std::optional<double> sharpe;  // empty when risk_annual == 0
};

/// (P1 - P0) / P0 per consecutive pair.
ReturnSeries simple_returns(const PriceSeries& series);
/// ln(P1 / P0) per consecutive pair.
ReturnSeries log_returns(const PriceSeries& series);

double mean(std::span<const double> values);
/// Two-pass sample variance, divisor n - 1. Needs n >= 2.
double sample_variance(std::span<const double> values);
/// sqrt(sample_variance), with deviations at rounding-noise level
/// (below kVolatilityNoiseFloor) reported as exactly zero.
double sample_stddev(std::span<const double> values);

inline constexpr double kVolatilityNoiseFloor = 1e-14;

/// Mean daily log return scaled by 252.
double annualize_return(const ReturnSeries& returns);
/// Sample standard deviation scaled by sqrt(252).
double annualize_risk(const ReturnSeries& returns);

/// (return - risk_free) / risk. Throws NumericError("undefined Sharpe") for risk <= 0.
double sharpe_ratio(double return_annual, double risk_annual, double risk_free);

AssetStats asset_stats(const PriceSeries& series, double risk_free = kDefaultRiskFree);

}  // namespace gbmfolio
