#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gbmfolio/market_data.hpp"
#include "gbmfolio/random.hpp"
#include "gbmfolio/stats.hpp"

namespace gbmfolio {

/// Long-only allocation: every value >= 0 and the values sum to 1 (1e-9).
class Weights {
public:
  explicit Weights(std::vector<double> values);
  static Weights equal(std::size_t n);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

struct PortfolioStats {
  double return_annual = 0.0;
  double risk_annual = 0.0;
  std::optional<double> sharpe;  // empty when the portfolio has zero variance
};

/// A buy-and-hold position in a set of assets.
struct Portfolio {
  std::vector<std::string> tickers;
  Weights weights;
  double capital;
  PriceSeries value_series;
};

/// Daily log-return mean vector and sample covariance matrix (n - 1) of a panel.
class ReturnMoments {
public:
  explicit ReturnMoments(const PricePanel& panel);

  std::size_t num_assets() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  double covariance(std::size_t i, std::size_t j) const { return cov_[i * mean_.size() + j]; }

  /// Annualized return, risk and Sharpe of `weights` against these moments.
  PortfolioStats evaluate(const Weights& weights, double risk_free) const;

private:
  std::vector<double> mean_;
  std::vector<double> cov_;
};

/// value(t) = capital * sum_j w_j * P_j(t) / P_j(0); no rebalancing.
PriceSeries portfolio_value_series(const PricePanel& panel, const Weights& weights, double capital,
                                   std::string id = "portfolio");

Portfolio make_portfolio(const PricePanel& panel, const Weights& weights, double capital,
                         std::string id = "portfolio");

/// Independent uniforms normalized by their sum.
Weights random_weights(std::size_t n_assets, RandomStream& stream);

/// Like ReturnMoments(panel).evaluate(...), but throws NumericError when the
/// Sharpe index is undefined (zero portfolio variance).
PortfolioStats portfolio_stats(const PricePanel& panel, const Weights& weights,
                               double risk_free = kDefaultRiskFree);

struct OptimizationResult {
  Weights weights;
  PortfolioStats stats;
  std::size_t trial;  // 0 = equal-weight baseline
};

/// Best Sharpe among the equal-weight portfolio (trial 0) and `n_trials`
/// random allocations; trial i draws from RandomStream(seed, i). The result
/// does not depend on `threads`. Ties keep the lowest trial index.
OptimizationResult optimize_max_sharpe(const PricePanel& panel, std::size_t n_trials,
                                       std::uint64_t seed, double risk_free = kDefaultRiskFree,
                                       unsigned threads = 0);

enum class RankMetric { return_annual, risk, sharpe };

std::string_view to_string(RankMetric metric);
/// Accepts "return", "risk", "sharpe"; throws UsageError otherwise.
RankMetric parse_rank_metric(std::string_view text);

struct RankedAsset {
  std::string ticker;
  std::size_t column;  // index into the universe panel
  double value;
};

struct PortfolioGroup {
  RankMetric metric;
  std::vector<RankedAsset> ranking;            // descending by metric
  std::vector<std::vector<std::string>> groups;  // consecutive chunks of ranking
};

/// Sorts assets by metric (descending, ties by ticker) and chunks them into
/// `group_count` groups of `group_size`. Throws UsageError if the universe size
/// is not group_count * group_size, NumericError if a Sharpe is undefined.
PortfolioGroup rank_and_group(const PricePanel& universe, RankMetric metric,
                              double risk_free = kDefaultRiskFree, std::size_t group_count = 6,
                              std::size_t group_size = 13);

}  // namespace gbmfolio
