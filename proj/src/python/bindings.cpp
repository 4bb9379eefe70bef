#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gbmfolio/errors.hpp"
#include "gbmfolio/evaluation.hpp"
#include "gbmfolio/gbm.hpp"
#include "gbmfolio/market_data.hpp"
#include "gbmfolio/portfolio.hpp"
#include "gbmfolio/stats.hpp"

namespace py = pybind11;
using namespace gbmfolio;

namespace {

std::vector<Date> to_dates(const std::vector<std::string>& text) {
  std::vector<Date> out;
  out.reserve(text.size());
  for (const auto& t : text) out.push_back(Date::parse(t));
  return out;
}

std::vector<std::string> from_dates(const std::vector<Date>& dates) {
  std::vector<std::string> out;
  out.reserve(dates.size());
  for (const auto& d : dates) out.push_back(d.to_string());
  return out;
}

// Prices only; dates are synthesized as consecutive days from 2000-01-01.
PriceSeries series_from_prices(const std::vector<double>& prices) {
  std::vector<Date> dates;
  Date d(2000, 1, 1);
  for (std::size_t i = 0; i < prices.size(); ++i, d = d.next_day()) dates.push_back(d);
  return PriceSeries("series", std::move(dates), prices);
}

ReturnSeries log_return_series(const std::vector<double>& values) {
  ReturnSeries r;
  r.values = values;
  r.kind = ReturnKind::log;
  return r;
}

GbmParams make_params(double s0, double mu, double sigma, double dt) {
  GbmParams p{s0, mu, sigma, dt};
  p.validate();
  return p;
}

std::vector<HorizonSpec> to_horizons(const std::optional<std::vector<std::pair<std::string, std::size_t>>>& h) {
  if (!h) return default_horizons();
  std::vector<HorizonSpec> out;
  for (const auto& [label, days] : *h) out.push_back({label, days});
  return out;
}

MapeDenominator to_denominator(const std::string& text) {
  if (text == "forecast") return MapeDenominator::forecast;
  if (text == "actual") return MapeDenominator::actual;
  throw UsageError("denominator must be 'forecast' or 'actual'");
}

py::dict stats_dict(const PortfolioStats& s) {
  py::dict d;
  d["return_annual"] = s.return_annual;
  d["risk_annual"] = s.risk_annual;
  d["sharpe"] = s.sharpe ? py::cast(*s.sharpe) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GBM price simulation, Monte Carlo portfolio optimization and forecast scoring";

  static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
  static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric_error, e.what());
    }
  });
  // UsageError derives from std::invalid_argument and maps to ValueError.

  py::class_<PriceSeries>(m, "PriceSeries")
      .def(py::init([](std::string ticker, const std::vector<std::string>& dates,
                       std::vector<double> prices) {
             return PriceSeries(std::move(ticker), to_dates(dates), std::move(prices));
           }),
           py::arg("ticker"), py::arg("dates"), py::arg("prices"))
      .def_property_readonly("ticker", &PriceSeries::ticker)
      .def_property_readonly("dates", [](const PriceSeries& s) { return from_dates(s.dates()); })
      .def_property_readonly("prices", &PriceSeries::prices)
      .def("__len__", &PriceSeries::size)
      .def("__repr__", [](const PriceSeries& s) {
        return "<PriceSeries " + s.ticker() + " n=" + std::to_string(s.size()) + ">";
      });

  py::class_<PricePanel>(m, "PricePanel")
      .def_property_readonly("tickers", &PricePanel::tickers)
      .def_property_readonly("dates", [](const PricePanel& p) { return from_dates(p.dates()); })
      .def_property_readonly("matrix",
                             [](const PricePanel& p) {
                               py::array_t<double> out({p.num_dates(), p.num_assets()});
                               auto v = out.mutable_unchecked<2>();
                               for (std::size_t t = 0; t < p.num_dates(); ++t)
                                 for (std::size_t j = 0; j < p.num_assets(); ++j) v(t, j) = p.at(t, j);
                               return out;
                             })
      .def("column", &PricePanel::column);

  py::class_<AssetStats>(m, "AssetStats")
      .def_readonly("mu_daily", &AssetStats::mu_daily)
      .def_readonly("sigma_daily", &AssetStats::sigma_daily)
      .def_readonly("return_annual", &AssetStats::return_annual)
      .def_readonly("risk_annual", &AssetStats::risk_annual)
      .def_readonly("sharpe", &AssetStats::sharpe);

  py::class_<PortfolioStats>(m, "PortfolioStats")
      .def_readonly("return_annual", &PortfolioStats::return_annual)
      .def_readonly("risk_annual", &PortfolioStats::risk_annual)
      .def_readonly("sharpe", &PortfolioStats::sharpe);

  py::class_<PathSet>(m, "PathSet")
      .def_property_readonly("n_paths", &PathSet::n_paths)
      .def_property_readonly("horizon", [](const PathSet& p) { return p.config().horizon; })
      .def_property_readonly("paths", [](const PathSet& p) {
        py::array_t<double> out({p.n_paths(), p.steps()});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < p.n_paths(); ++i)
          for (std::size_t k = 0; k < p.steps(); ++k) v(i, k) = p.at(i, k);
        return out;
      });

  // market data
  m.def("load_csv", [](const std::filesystem::path& path, const std::string& ticker) {
    return load_csv(path, ticker);
  }, py::arg("path"), py::arg("ticker"));
  m.def("align_panel", [](const std::vector<PriceSeries>& s) { return align_panel(s); });
  m.def("normalize_base100", &normalize_base100);
  m.def("slice_period", [](const PriceSeries& s, const std::string& start, const std::string& end) {
    return slice_period(s, Date::parse(start), Date::parse(end));
  });

  // stats
  m.def("simple_returns", [](const std::vector<double>& prices) {
    return simple_returns(series_from_prices(prices)).values;
  });
  m.def("log_returns", [](const std::vector<double>& prices) {
    return log_returns(series_from_prices(prices)).values;
  });
  m.def("annualize_return", [](const std::vector<double>& log_returns) {
    return annualize_return(log_return_series(log_returns));
  });
  m.def("annualize_risk", [](const std::vector<double>& returns) {
    return annualize_risk(log_return_series(returns));
  });
  m.def("sharpe_ratio", &sharpe_ratio, py::arg("return_annual"), py::arg("risk_annual"),
        py::arg("risk_free") = kDefaultRiskFree);
  m.def("asset_stats", &asset_stats, py::arg("series"), py::arg("risk_free") = kDefaultRiskFree);

  // portfolio
  m.def("portfolio_value_series",
        [](const PricePanel& panel, std::vector<double> w, double capital) {
          return portfolio_value_series(panel, Weights(std::move(w)), capital);
        },
        py::arg("panel"), py::arg("weights"), py::arg("capital"));
  m.def("random_weights", [](std::size_t n, std::uint64_t seed, std::uint64_t index) {
    RandomStream stream(seed, index);
    return random_weights(n, stream).values();
  }, py::arg("n_assets"), py::arg("seed"), py::arg("index") = 0);
  m.def("portfolio_stats",
        [](const PricePanel& panel, std::vector<double> w, double rf) {
          return portfolio_stats(panel, Weights(std::move(w)), rf);
        },
        py::arg("panel"), py::arg("weights"), py::arg("risk_free") = kDefaultRiskFree);
  m.def("optimize_max_sharpe",
        [](const PricePanel& panel, std::size_t n_trials, std::uint64_t seed, double rf) {
          auto r = optimize_max_sharpe(panel, n_trials, seed, rf);
          return py::make_tuple(r.weights.values(), stats_dict(r.stats), r.trial);
        },
        py::arg("panel"), py::arg("n_trials"), py::arg("seed"),
        py::arg("risk_free") = kDefaultRiskFree);
  m.def("rank_and_group",
        [](const PricePanel& universe, const std::string& metric, double rf, std::size_t count,
           std::size_t size) {
          return rank_and_group(universe, parse_rank_metric(metric), rf, count, size).groups;
        },
        py::arg("universe"), py::arg("metric"), py::arg("risk_free") = kDefaultRiskFree,
        py::arg("group_count") = 6, py::arg("group_size") = 13);

  // gbm
  m.def("wiener_increments", [](std::size_t n, double dt, std::uint64_t seed, std::uint64_t index) {
    RandomStream stream(seed, index);
    return wiener_increments(n, dt, stream);
  }, py::arg("n"), py::arg("dt"), py::arg("seed"), py::arg("index") = 0);
  m.def("gbm_path",
        [](double s0, double mu, double sigma, std::size_t horizon, std::uint64_t seed,
           std::uint64_t index, double dt) {
          RandomStream stream(seed, index);
          return gbm_path(make_params(s0, mu, sigma, dt), horizon, stream);
        },
        py::arg("s0"), py::arg("mu"), py::arg("sigma"), py::arg("horizon"), py::arg("seed"),
        py::arg("index") = 0, py::arg("dt") = 1.0);
  m.def("simulate_ensemble",
        [](double s0, double mu, double sigma, std::size_t n_paths, std::size_t horizon,
           std::uint64_t seed, double dt) {
          py::gil_scoped_release release;
          return simulate_ensemble(make_params(s0, mu, sigma, dt), {n_paths, horizon, seed});
        },
        py::arg("s0"), py::arg("mu"), py::arg("sigma"), py::arg("n_paths") = 1000,
        py::arg("horizon") = 247, py::arg("seed") = 0, py::arg("dt") = 1.0);
  m.def("envelope", [](const PathSet& paths, double lower_q, double upper_q) {
    auto e = envelope(paths, lower_q, upper_q);
    py::dict d;
    d["lower"] = e.lower;
    d["upper"] = e.upper;
    d["mean"] = e.mean;
    return d;
  }, py::arg("paths"), py::arg("lower_q") = 0.05, py::arg("upper_q") = 0.95);
  m.def("calibrate", [](const PriceSeries& s) {
    auto p = calibrate(s);
    py::dict d;
    d["s0"] = p.s0;
    d["mu"] = p.mu;
    d["sigma"] = p.sigma;
    d["dt"] = p.dt;
    return d;
  });

  // evaluation
  m.def("pearson_correlation", [](const std::vector<double>& x, const std::vector<double>& y) {
    return pearson_correlation(x, y);
  });
  m.def("mape",
        [](const std::vector<double>& a, const std::vector<double>& f, const std::string& denom) {
          return mape(a, f, to_denominator(denom));
        },
        py::arg("actual"), py::arg("forecast"), py::arg("denominator") = "forecast");
  m.def("classify_mape", [](double v) { return std::string(to_string(classify_mape(v))); });
  m.def("default_horizons", [] {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& h : default_horizons()) out.emplace_back(h.label, h.days);
    return out;
  });
  m.def("evaluate_ensemble",
        [](const PathSet& paths, const std::vector<double>& actual,
           const std::optional<std::vector<std::pair<std::string, std::size_t>>>& horizons,
           const std::string& denom) {
          const auto h = to_horizons(horizons);
          const auto report = evaluate_ensemble(paths, actual, h, {}, to_denominator(denom));
          py::list out;
          for (const auto& r : report.horizons) {
            py::dict d;
            d["horizon"] = r.horizon.label;
            d["days"] = r.horizon.days;
            d["mean_correlation"] = r.mean_correlation ? py::cast(*r.mean_correlation) : py::none();
            d["mape"] = r.mape;
            d["band"] = std::string(to_string(r.band));
            out.append(d);
          }
          return out;
        },
        py::arg("paths"), py::arg("actual"), py::arg("horizons") = py::none(),
        py::arg("denominator") = "forecast");
}
