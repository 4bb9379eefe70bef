#include "gbmfolio/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "gbmfolio/errors.hpp"
#include "gbmfolio/parallel.hpp"

namespace gbmfolio {

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::vector<HorizonSpec> default_horizons() {
  return {{"1w", TradingCalendar::week},
          {"2w", TradingCalendar::two_weeks},
          {"1m", TradingCalendar::month},
          {"6m", TradingCalendar::six_months},
          {"1y", TradingCalendar::year}};
}

std::vector<HorizonSpec> parse_horizons(std::string_view text) {
  const auto standard = default_horizons();
  std::vector<HorizonSpec> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;

    if (const auto eq = item.find('='); eq != std::string_view::npos) {
      const auto label = item.substr(0, eq);
      const auto days_text = item.substr(eq + 1);
      std::size_t days = 0;
      auto [ptr, ec] = std::from_chars(days_text.data(), days_text.data() + days_text.size(), days);
      if (label.empty() || ec != std::errc{} || ptr != days_text.data() + days_text.size() ||
          days == 0) {
        throw UsageError("bad horizon '" + std::string(item) + "'");
      }
      out.push_back({std::string(label), days});
      continue;
    }
    auto it = std::find_if(standard.begin(), standard.end(),
                           [&](const HorizonSpec& h) { return h.label == item; });
    if (it == standard.end()) {
      throw UsageError("unknown horizon '" + std::string(item) + "' (use 1w,2w,1m,6m,1y or label=days)");
    }
    out.push_back(*it);
  }
  if (out.empty()) throw UsageError("no horizons given");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].days <= out[i - 1].days) throw UsageError("horizon days must be increasing");
  }
  return out;
}

std::string_view to_string(PrecisionBand band) {
  switch (band) {
    case PrecisionBand::high: return "high";
    case PrecisionBand::good: return "good";
    case PrecisionBand::reasonable: return "reasonable";
    case PrecisionBand::imprecise: return "imprecise";
  }
  return "?";
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("pearson_correlation: length mismatch");
  if (x.size() < 2) throw UsageError("pearson_correlation: need at least 2 points");
  if (is_constant(x) || is_constant(y)) throw NumericError("undefined correlation (constant input)");

  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("undefined correlation (constant input)");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double mape(std::span<const double> actual, std::span<const double> forecast,
            MapeDenominator denominator) {
  if (actual.size() != forecast.size()) throw UsageError("mape: length mismatch");
  if (actual.empty()) throw UsageError("mape: empty input");
  double sum = 0.0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    const double d = denominator == MapeDenominator::forecast ? forecast[t] : actual[t];
    if (d == 0.0) throw NumericError("mape: zero denominator");
    sum += std::abs((actual[t] - forecast[t]) / d);
  }
  return sum / static_cast<double>(actual.size());
}

PrecisionBand classify_mape(double value) {
  if (value <= 0.10) return PrecisionBand::high;
  if (value <= 0.20) return PrecisionBand::good;
  if (value <= 0.50) return PrecisionBand::reasonable;
  return PrecisionBand::imprecise;
}

EvalReport evaluate_ensemble(const PathSet& paths, std::span<const double> actual,
                             std::span<const HorizonSpec> horizons, std::string subject,
                             MapeDenominator denominator) {
  if (horizons.empty()) throw UsageError("evaluate_ensemble: no horizons");
  std::size_t max_h = 0;
  for (const auto& h : horizons) {
    if (h.days == 0) throw UsageError("evaluate_ensemble: horizon of 0 days");
    max_h = std::max(max_h, h.days);
  }
  if (actual.size() < max_h + 1) {
    throw DataError("actual series too short: " + std::to_string(actual.size()) +
                    " prices for a " + std::to_string(max_h) + "-day horizon");
  }
  if (paths.config().horizon < max_h) {
    throw DataError("simulated horizon shorter than the longest evaluation horizon");
  }

  const std::size_t n_paths = paths.n_paths();
  const std::size_t n_h = horizons.size();
  // Per (path, horizon) results; reduced below in path order.
  std::vector<double> corr(n_paths * n_h);
  std::vector<unsigned char> corr_ok(n_paths * n_h, 0);
  std::vector<double> err(n_paths * n_h);

  parallel_for(n_paths, 0, [&](std::size_t i) {
    const auto path = paths.path(i);
    for (std::size_t k = 0; k < n_h; ++k) {
      const std::size_t h = horizons[k].days;
      const auto a = actual.subspan(1, h);
      const auto f = path.subspan(1, h);
      err[i * n_h + k] = mape(a, f, denominator);
      if (h >= 2 && !is_constant(a) && !is_constant(f)) {
        corr[i * n_h + k] = pearson_correlation(a, f);
        corr_ok[i * n_h + k] = 1;
      }
    }
  });

  EvalReport report{std::move(subject), {}};
  for (std::size_t k = 0; k < n_h; ++k) {
    double corr_sum = 0.0, err_sum = 0.0;
    std::size_t corr_count = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
      err_sum += err[i * n_h + k];
      if (corr_ok[i * n_h + k]) {
        corr_sum += corr[i * n_h + k];
        ++corr_count;
      }
    }
    HorizonResult r;
    r.horizon = horizons[k];
    r.correlated_paths = corr_count;
    if (corr_count > 0) r.mean_correlation = corr_sum / static_cast<double>(corr_count);
    r.mape = err_sum / static_cast<double>(n_paths);
    r.band = classify_mape(r.mape);
    report.horizons.push_back(std::move(r));
  }
  return report;
}

}  // namespace gbmfolio
