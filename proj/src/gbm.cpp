#include "gbmfolio/gbm.hpp"

#include <algorithm>
#include <cmath>

#include "gbmfolio/errors.hpp"
#include "gbmfolio/parallel.hpp"
#include "gbmfolio/stats.hpp"

namespace gbmfolio {

namespace {

// 1-based nearest rank: ceil(q * n), at least 1.
std::size_t nearest_rank(double q, std::size_t n) {
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  return std::clamp<std::size_t>(rank, 1, n);
}

}  // namespace

void GbmParams::validate() const {
  if (!(std::isfinite(s0) && s0 > 0.0)) throw UsageError("GBM s0 must be positive");
  if (!std::isfinite(mu)) throw UsageError("GBM mu must be finite");
  if (!(std::isfinite(sigma) && sigma >= 0.0)) throw UsageError("GBM sigma must be >= 0");
  if (!(std::isfinite(dt) && dt > 0.0)) throw UsageError("GBM dt must be positive");
}

PathSet::PathSet(GbmParams params, SimulationConfig config, std::vector<double> values)
    : params_(params), config_(config), values_(std::move(values)) {
  if (config_.n_paths == 0 || config_.horizon == 0) {
    throw UsageError("simulation needs n_paths >= 1 and horizon >= 1");
  }
  if (values_.size() != config_.n_paths * (config_.horizon + 1)) {
    throw UsageError("path matrix size does not match configuration");
  }
}

std::vector<double> wiener_increments(std::size_t n, double dt, RandomStream& stream) {
  if (!(dt > 0.0)) throw UsageError("wiener_increments: dt must be positive");
  const double scale = std::sqrt(dt);
  std::vector<double> out(n);
  for (auto& v : out) v = stream.normal() * scale;
  return out;
}

std::vector<double> gbm_path(const GbmParams& params, std::size_t horizon, RandomStream& stream) {
  params.validate();
  const auto dw = wiener_increments(horizon, params.dt, stream);
  const double drift = params.mu - 0.5 * params.sigma * params.sigma;
  std::vector<double> path(horizon + 1);
  path[0] = params.s0;
  double w = 0.0;
  for (std::size_t k = 1; k <= horizon; ++k) {
    w += dw[k - 1];
    const double t = static_cast<double>(k) * params.dt;
    path[k] = params.s0 * std::exp(drift * t + params.sigma * w);
  }
  return path;
}

PathSet simulate_ensemble(const GbmParams& params, const SimulationConfig& config,
                          unsigned threads) {
  params.validate();
  if (config.n_paths == 0 || config.horizon == 0) {
    throw UsageError("simulation needs n_paths >= 1 and horizon >= 1");
  }
  const std::size_t steps = config.horizon + 1;
  std::vector<double> values(config.n_paths * steps);
  parallel_for(config.n_paths, threads, [&](std::size_t i) {
    RandomStream stream(config.seed, i);
    const auto path = gbm_path(params, config.horizon, stream);
    std::copy(path.begin(), path.end(), values.begin() + static_cast<std::ptrdiff_t>(i * steps));
  });
  return PathSet(params, config, std::move(values));
}

Envelope envelope(const PathSet& paths, double lower_q, double upper_q) {
  if (!(0.0 <= lower_q && lower_q < upper_q && upper_q <= 1.0)) {
    throw UsageError("envelope: need 0 <= lower_q < upper_q <= 1");
  }
  const std::size_t n = paths.n_paths();
  const std::size_t lo_rank = nearest_rank(lower_q, n);
  const std::size_t hi_rank = nearest_rank(upper_q, n);

  Envelope env;
  env.lower.resize(paths.steps());
  env.upper.resize(paths.steps());
  env.mean.resize(paths.steps());
  std::vector<double> column(n);
  for (std::size_t k = 0; k < paths.steps(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = paths.at(i, k);
      sum += column[i];
    }
    std::sort(column.begin(), column.end());
    env.lower[k] = column[lo_rank - 1];
    env.upper[k] = column[hi_rank - 1];
    env.mean[k] = sum / static_cast<double>(n);
  }
  return env;
}

GbmParams calibrate(const PriceSeries& history) {
  const auto r = log_returns(history);
  GbmParams p;
  p.s0 = history.back();
  p.mu = mean(r.values);
  p.sigma = r.values.size() >= 2 ? sample_stddev(r.values) : 0.0;
  p.dt = 1.0;
  return p;
}

}  // namespace gbmfolio
