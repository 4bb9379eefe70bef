#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gbmfolio/market_data.hpp"
#include "gbmfolio/random.hpp"

namespace gbmfolio {

/// Geometric Brownian motion parameters, in trading-day units.
struct GbmParams {
  double s0 = 100.0;
  double mu = 0.0;     // drift per day
  double sigma = 0.0;  // volatility per sqrt(day)
  double dt = 1.0;     // step length in days

  /// Throws UsageError unless s0 > 0, sigma >= 0, dt > 0 (all finite).
  void validate() const;
};

struct SimulationConfig {
  std::size_t n_paths = 1000;
  std::size_t horizon = TradingCalendar::year;
  std::uint64_t seed = 0;
};

/// n_paths x (horizon + 1) simulated prices. Path i is generated from
/// RandomStream(config.seed, i) alone.
class PathSet {
public:
  PathSet(GbmParams params, SimulationConfig config, std::vector<double> values);

  const GbmParams& params() const { return params_; }
  const SimulationConfig& config() const { return config_; }
  std::size_t n_paths() const { return config_.n_paths; }
  std::size_t steps() const { return config_.horizon + 1; }

  std::span<const double> path(std::size_t i) const {
    return {values_.data() + i * steps(), steps()};
  }
  double at(std::size_t path_index, std::size_t step) const {
    return values_[path_index * steps() + step];
  }

private:
  GbmParams params_;
  SimulationConfig config_;
  std::vector<double> values_;
};

struct Envelope {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> mean;
};

/// n draws of eps * sqrt(dt), eps ~ N(0, 1).
std::vector<double> wiener_increments(std::size_t n, double dt, RandomStream& stream);

/// Closed-form GBM: S_k = s0 * exp((mu - sigma^2/2) k dt + sigma W_k), where
/// W_k is the running sum of Wiener increments. Length horizon + 1.
std::vector<double> gbm_path(const GbmParams& params, std::size_t horizon, RandomStream& stream);

PathSet simulate_ensemble(const GbmParams& params, const SimulationConfig& config,
                          unsigned threads = 0);

/// Per-step nearest-rank quantiles across paths plus the arithmetic mean.
/// Requires 0 <= lower_q < upper_q <= 1.
Envelope envelope(const PathSet& paths, double lower_q, double upper_q);

/// mu = mean daily log return, sigma = its sample standard deviation,
/// s0 = the last price of the series.
GbmParams calibrate(const PriceSeries& history);

}  // namespace gbmfolio
