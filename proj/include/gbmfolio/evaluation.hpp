#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gbmfolio/gbm.hpp"
#include "gbmfolio/market_data.hpp"

namespace gbmfolio {

struct HorizonSpec {
  std::string label;
  std::size_t days;
};

/// 1w=5, 2w=10, 1m=21, 6m=126, 1y=247 trading days.
std::vector<HorizonSpec> default_horizons();

/// Parses "1w,2w,1m" (standard labels) and/or "label=days" entries.
/// Throws UsageError on unknown labels or non-increasing day counts.
std::vector<HorizonSpec> parse_horizons(std::string_view text);

enum class PrecisionBand { high, good, reasonable, imprecise };

std::string_view to_string(PrecisionBand band);

/// Which value divides the absolute error in MAPE.
enum class MapeDenominator {
  forecast,  // |A - F| / F, the default
  actual,    // |A - F| / A, the textbook form
};

/// Product-moment correlation, clamped to [-1, 1]. Throws NumericError
/// ("undefined correlation") if either input is constant, UsageError on
/// mismatched lengths or fewer than 2 points.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Mean over t of |A_t - F_t| / F_t (or / A_t). Throws NumericError if a
/// denominator is zero.
double mape(std::span<const double> actual, std::span<const double> forecast,
            MapeDenominator denominator = MapeDenominator::forecast);

/// <= 0.10 high, <= 0.20 good, <= 0.50 reasonable, otherwise imprecise.
PrecisionBand classify_mape(double mape);

struct HorizonResult {
  HorizonSpec horizon;
  std::optional<double> mean_correlation;  // empty if no path had a defined correlation
  std::size_t correlated_paths = 0;
  double mape = 0.0;
  PrecisionBand band = PrecisionBand::high;
};

struct EvalReport {
  std::string subject;
  std::vector<HorizonResult> horizons;
};

/// Scores every path against `actual` over days 1..h of each horizon h.
/// actual[0] is the known starting price and is excluded. Paths whose
/// segment is constant are left out of the correlation mean but still
/// count toward MAPE.
EvalReport evaluate_ensemble(const PathSet& paths, std::span<const double> actual,
                             std::span<const HorizonSpec> horizons, std::string subject = {},
                             MapeDenominator denominator = MapeDenominator::forecast);

inline EvalReport evaluate_ensemble(const PathSet& paths, const PriceSeries& actual,
                                    std::span<const HorizonSpec> horizons,
                                    MapeDenominator denominator = MapeDenominator::forecast) {
  return evaluate_ensemble(paths, actual.prices(), horizons, actual.ticker(), denominator);
}

}  // namespace gbmfolio
