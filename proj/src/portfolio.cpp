#include "gbmfolio/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gbmfolio/errors.hpp"
#include "gbmfolio/parallel.hpp"

namespace gbmfolio {

namespace {

const double kSqrtDaysPerYear = std::sqrt(static_cast<double>(TradingCalendar::days_per_year));

void require_matching(const PricePanel& panel, const Weights& weights) {
  if (weights.size() != panel.num_assets()) {
    throw UsageError("weights have " + std::to_string(weights.size()) + " entries for " +
                     std::to_string(panel.num_assets()) + " assets");
  }
}

}  // namespace

Weights::Weights(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw UsageError("weights must not be empty");
  double sum = 0.0;
  for (double w : values_) {
    if (!std::isfinite(w) || w < 0.0) throw UsageError("weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw UsageError("weights must sum to 1");
}

Weights Weights::equal(std::size_t n) {
  if (n == 0) throw UsageError("weights must not be empty");
  return Weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ReturnMoments::ReturnMoments(const PricePanel& panel) {
  const std::size_t n = panel.num_assets();
  const std::size_t t_count = panel.num_dates();
  if (t_count < 3) throw DataError("need at least 3 dates for return covariance");
  const std::size_t m = t_count - 1;

  std::vector<double> r(m * n);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t j = 0; j < n; ++j) r[t * n + j] = std::log(panel.at(t + 1, j) / panel.at(t, j));
  }
  mean_.assign(n, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t j = 0; j < n; ++j) mean_[j] += r[t * n + j];
  }
  for (auto& v : mean_) v /= static_cast<double>(m);

  cov_.assign(n * n, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double di = r[t * n + i] - mean_[i];
      for (std::size_t j = i; j < n; ++j) cov_[i * n + j] += di * (r[t * n + j] - mean_[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      cov_[i * n + j] /= static_cast<double>(m - 1);
      cov_[j * n + i] = cov_[i * n + j];
    }
  }
}

PortfolioStats ReturnMoments::evaluate(const Weights& weights, double risk_free) const {
  const std::size_t n = mean_.size();
  if (weights.size() != n) throw UsageError("weights do not match asset count");
  double mu = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += weights[i] * mean_[i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += cov_[i * n + j] * weights[j];
    var += weights[i] * row;
  }
  double sd = std::sqrt(std::max(var, 0.0));
  if (sd < kVolatilityNoiseFloor) sd = 0.0;

  PortfolioStats s;
  s.return_annual = mu * TradingCalendar::days_per_year;
  s.risk_annual = sd * kSqrtDaysPerYear;
  if (s.risk_annual > 0.0) s.sharpe = (s.return_annual - risk_free) / s.risk_annual;
  return s;
}

PriceSeries portfolio_value_series(const PricePanel& panel, const Weights& weights, double capital,
                                   std::string id) {
  require_matching(panel, weights);
  if (!(capital > 0.0) || !std::isfinite(capital)) throw UsageError("capital must be positive");
  const std::size_t n = panel.num_assets();
  std::vector<double> values(panel.num_dates());
  values[0] = capital;
  for (std::size_t t = 1; t < panel.num_dates(); ++t) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += weights[j] * panel.at(t, j) / panel.at(0, j);
    values[t] = capital * v;
  }
  return PriceSeries(std::move(id), panel.dates(), std::move(values));
}

Portfolio make_portfolio(const PricePanel& panel, const Weights& weights, double capital,
                         std::string id) {
  auto series = portfolio_value_series(panel, weights, capital, std::move(id));
  return Portfolio{panel.tickers(), weights, capital, std::move(series)};
}

Weights random_weights(std::size_t n_assets, RandomStream& stream) {
  if (n_assets == 0) throw UsageError("random_weights: n_assets must be >= 1");
  std::vector<double> w(n_assets);
  double sum = 0.0;
  while (!(sum > 0.0)) {
    sum = 0.0;
    for (auto& v : w) {
      v = stream.uniform();
      sum += v;
    }
  }
  for (auto& v : w) v /= sum;
  return Weights(std::move(w));
}

PortfolioStats portfolio_stats(const PricePanel& panel, const Weights& weights, double risk_free) {
  require_matching(panel, weights);
  auto stats = ReturnMoments(panel).evaluate(weights, risk_free);
  if (!stats.sharpe) throw NumericError("undefined Sharpe (portfolio variance is zero)");
  return stats;
}

OptimizationResult optimize_max_sharpe(const PricePanel& panel, std::size_t n_trials,
                                       std::uint64_t seed, double risk_free, unsigned threads) {
  if (n_trials == 0) throw UsageError("optimize_max_sharpe: n_trials must be >= 1");
  const ReturnMoments moments(panel);
  const std::size_t n = panel.num_assets();

  auto weights_for = [&](std::size_t trial) {
    if (trial == 0) return Weights::equal(n);
    RandomStream stream(seed, trial);
    return random_weights(n, stream);
  };

  constexpr double kUndefined = -std::numeric_limits<double>::infinity();
  std::vector<double> sharpe(n_trials + 1, kUndefined);
  parallel_for(n_trials + 1, threads, [&](std::size_t trial) {
    const auto s = moments.evaluate(weights_for(trial), risk_free);
    if (s.sharpe) sharpe[trial] = *s.sharpe;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < sharpe.size(); ++i) {
    if (sharpe[i] > sharpe[best]) best = i;
  }
  if (sharpe[best] == kUndefined) {
    throw NumericError("optimize_max_sharpe: Sharpe undefined for every trial");
  }
  auto w = weights_for(best);
  auto stats = moments.evaluate(w, risk_free);
  return OptimizationResult{std::move(w), stats, best};
}

std::string_view to_string(RankMetric metric) {
  switch (metric) {
    case RankMetric::return_annual: return "return";
    case RankMetric::risk: return "risk";
    case RankMetric::sharpe: return "sharpe";
  }
  return "?";
}

RankMetric parse_rank_metric(std::string_view text) {
  if (text == "return") return RankMetric::return_annual;
  if (text == "risk") return RankMetric::risk;
  if (text == "sharpe") return RankMetric::sharpe;
  throw UsageError("unknown metric '" + std::string(text) + "' (expected return|risk|sharpe)");
}

PortfolioGroup rank_and_group(const PricePanel& universe, RankMetric metric, double risk_free,
                              std::size_t group_count, std::size_t group_size) {
  if (group_count == 0 || group_size == 0) throw UsageError("group count and size must be >= 1");
  if (universe.num_assets() != group_count * group_size) {
    throw UsageError("universe of " + std::to_string(universe.num_assets()) +
                     " assets cannot form " + std::to_string(group_count) + " groups of " +
                     std::to_string(group_size));
  }

  PortfolioGroup out{metric, {}, {}};
  for (std::size_t j = 0; j < universe.num_assets(); ++j) {
    const auto s = asset_stats(universe.column(j), risk_free);
    double value = 0.0;
    switch (metric) {
      case RankMetric::return_annual: value = s.return_annual; break;
      case RankMetric::risk: value = s.risk_annual; break;
      case RankMetric::sharpe:
        if (!s.sharpe) throw NumericError(universe.tickers()[j] + ": undefined Sharpe");
        value = *s.sharpe;
        break;
    }
    out.ranking.push_back({universe.tickers()[j], j, value});
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [](const RankedAsset& a, const RankedAsset& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.ticker < b.ticker;
  });
  for (std::size_t g = 0; g < group_count; ++g) {
    std::vector<std::string> members;
    for (std::size_t k = 0; k < group_size; ++k) {
      members.push_back(out.ranking[g * group_size + k].ticker);
    }
    out.groups.push_back(std::move(members));
  }
  return out;
}

}  // namespace gbmfolio
