#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gbmfolio/errors.hpp"
#include "gbmfolio/portfolio.hpp"
#include "test_support.hpp"

using namespace gbmfolio;
using testsupport::make_panel;

namespace {

// Brute-force annualized risk of a weighted portfolio: build the weighted
// daily log-return series and take its sample std. Equals sqrt(w' S w).
double brute_force_risk(const PricePanel& panel, const std::vector<double>& w) {
  const std::size_t m = panel.num_dates() - 1;
  std::vector<long double> rp(m, 0.0L);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      rp[t] += w[j] * std::log(static_cast<long double>(panel.at(t + 1, j)) / panel.at(t, j));
    }
  }
  long double mean = std::accumulate(rp.begin(), rp.end(), 0.0L) / m;
  long double ss = 0;
  for (auto v : rp) ss += (v - mean) * (v - mean);
  return static_cast<double>(std::sqrt(ss / (m - 1)) * std::sqrt(252.0L));
}

double brute_force_sharpe(const PricePanel& panel, const std::vector<double>& w, double rf) {
  const std::size_t m = panel.num_dates() - 1;
  long double mu = 0;
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      mu += w[j] * std::log(static_cast<long double>(panel.at(t + 1, j)) / panel.at(t, j));
    }
  }
  mu = mu / m * 252.0L;
  return static_cast<double>((mu - rf) / brute_force_risk(panel, w));
}

PricePanel random_panel(std::mt19937_64& rng, std::size_t assets, std::size_t days) {
  std::uniform_real_distribution<double> mu(-0.001, 0.002), sigma(0.005, 0.04);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < assets; ++j) {
    cols.push_back(testsupport::random_walk_prices(rng, days, mu(rng), sigma(rng)));
  }
  return make_panel(cols);
}

// Two assets with identical shocks; A earns `edge` more per day.
PricePanel dominant_pair(std::uint64_t seed, double edge = 0.001) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0003, 0.012);
  std::vector<double> a{50.0}, b{50.0};
  for (int t = 1; t < 500; ++t) {
    const double r = z(rng);
    a.push_back(a.back() * std::exp(r + edge));
    b.push_back(b.back() * std::exp(r));
  }
  return make_panel({a, b});
}

}  // namespace

TEST_SUITE("portfolio") {
  TEST_CASE("Weights validation") {
    CHECK_NOTHROW(Weights({0.25, 0.75}));
    CHECK_THROWS_AS(Weights({0.5, 0.6}), UsageError);
    CHECK_THROWS_AS(Weights({-0.1, 1.1}), UsageError);
    CHECK_THROWS_AS(Weights(std::vector<double>{}), UsageError);
    CHECK(Weights::equal(4)[2] == 0.25);
  }

  TEST_CASE("portfolio_value_series") {
    const auto single = make_panel({{10, 12}});
    CHECK(portfolio_value_series(single, Weights({1.0}), 100).prices() ==
          std::vector<double>{100, 120});

    const auto doubling = make_panel({{5, 10}, {40, 80}});
    const auto v = portfolio_value_series(doubling, Weights({0.3, 0.7}), 1000).prices();
    CHECK(v[1] == doctest::Approx(2000));

    const auto mixed = make_panel({{10, 12}, {10, 9}});
    const auto m = portfolio_value_series(mixed, Weights({0.5, 0.5}), 200).prices();
    CHECK(m[0] == 200);
    CHECK(m[1] == doctest::Approx(210).epsilon(1e-14));  // 200 * (0.5*1.2 + 0.5*0.9)

    CHECK_THROWS_AS(portfolio_value_series(mixed, Weights({1.0}), 100), UsageError);
  }

  TEST_CASE("portfolio_value_series is linear in capital and scale-free in prices") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto panel = random_panel(rng, 3, 50);
      RandomStream s(trial, 0);
      const auto w = random_weights(3, s);
      const auto base = portfolio_value_series(panel, w, 100).prices();
      const auto twice = portfolio_value_series(panel, w, 250).prices();
      std::vector<std::vector<double>> scaled(3);
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t t = 0; t < panel.num_dates(); ++t) scaled[j].push_back(panel.at(t, j) * 7.5);
      }
      const auto rescaled = portfolio_value_series(make_panel(scaled), w, 100).prices();
      for (std::size_t t = 0; t < base.size(); ++t) {
        CHECK(twice[t] == doctest::Approx(base[t] * 2.5).epsilon(1e-12));
        CHECK(rescaled[t] == doctest::Approx(base[t]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("random_weights") {
    RandomStream s1(0, 0);
    CHECK(random_weights(1, s1).values() == std::vector<double>{1.0});
    CHECK_THROWS_AS(random_weights(0, s1), UsageError);

    RandomStream a(123, 4), b(123, 4);
    const auto wa = random_weights(4, a);
    const auto wb = random_weights(4, b);
    CHECK(wa.values() == wb.values());
    CHECK(std::accumulate(wa.values().begin(), wa.values().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("random_weights covers the simplex symmetrically") {
    std::vector<double> sum(3, 0.0);
    std::vector<bool> above_half(3, false);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      RandomStream s(77, static_cast<std::uint64_t>(i));
      const auto w = random_weights(3, s);
      for (int j = 0; j < 3; ++j) {
        sum[j] += w[j];
        if (w[j] > 0.5) above_half[j] = true;
      }
    }
    for (int j = 0; j < 3; ++j) {
      CHECK(sum[j] / draws == doctest::Approx(1.0 / 3.0).epsilon(0.02 * 3));
      CHECK(std::abs(sum[j] / draws - 1.0 / 3.0) <= 0.02);
      CHECK(above_half[j]);
    }
  }

  TEST_CASE("portfolio_stats reduces to asset_stats for one asset") {
    std::mt19937_64 rng(4);
    const auto panel = random_panel(rng, 1, 300);
    const auto p = portfolio_stats(panel, Weights({1.0}), 0.019);
    const auto a = asset_stats(panel.column(0), 0.019);
    CHECK(std::abs(p.return_annual - a.return_annual) <= 1e-12);
    CHECK(std::abs(p.risk_annual - a.risk_annual) <= 1e-12);
    CHECK(std::abs(*p.sharpe - *a.sharpe) <= 1e-12);
  }

  TEST_CASE("identical assets: risk equals single-asset risk") {
    std::mt19937_64 rng(6);
    const auto p = testsupport::random_walk_prices(rng, 300, 0.0003, 0.02);
    const auto panel = make_panel({p, p});
    const auto two = portfolio_stats(panel, Weights({0.5, 0.5}));
    const auto one = asset_stats(panel.column(0));
    CHECK(two.risk_annual == doctest::Approx(one.risk_annual).epsilon(1e-12));
  }

  TEST_CASE("independent equal-sigma assets halve the variance") {
    std::mt19937_64 rng(8);
    const double sigma = 0.02;
    const auto panel = make_panel({testsupport::random_walk_prices(rng, 5000, 0.0, sigma),
                                   testsupport::random_walk_prices(rng, 5000, 0.0, sigma)});
    const auto stats = portfolio_stats(panel, Weights({0.5, 0.5}));
    CHECK(testsupport::rel_close(stats.risk_annual, brute_force_risk(panel, {0.5, 0.5}), 1e-10));
    const double expected = sigma * std::sqrt(252.0) / std::sqrt(2.0);
    CHECK(std::abs(stats.risk_annual / expected - 1.0) <= 0.05);
  }

  TEST_CASE("portfolio_stats matches brute force on random panels") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 30; ++trial) {
      const auto panel = random_panel(rng, 4, 120);
      RandomStream s(trial, 1);
      const auto w = random_weights(4, s);
      const auto stats = portfolio_stats(panel, w, 0.019);
      CHECK(testsupport::rel_close(stats.risk_annual, brute_force_risk(panel, w.values()), 1e-10));
      CHECK(*stats.sharpe == doctest::Approx(brute_force_sharpe(panel, w.values(), 0.019)).epsilon(1e-9));
    }
  }

  TEST_CASE("zero portfolio risk iff the weighted return series is constant") {
    std::vector<double> a, b;
    for (int t = 0; t < 50; ++t) {
      a.push_back(10 * std::exp(0.001 * t));
      b.push_back(20 * std::exp(0.002 * t));
    }
    const auto constant = make_panel({a, b});
    const auto s = ReturnMoments(constant).evaluate(Weights({0.4, 0.6}), 0.019);
    CHECK(s.risk_annual == 0.0);
    CHECK_FALSE(s.sharpe.has_value());
    CHECK_THROWS_AS(portfolio_stats(constant, Weights({0.4, 0.6})), NumericError);

    std::mt19937_64 rng(12);
    const auto noisy = random_panel(rng, 2, 50);
    CHECK(ReturnMoments(noisy).evaluate(Weights({0.4, 0.6}), 0.019).risk_annual > 0.0);
  }

  TEST_CASE("optimize_max_sharpe with one trial picks the better of baseline and draw") {
    std::mt19937_64 rng(13);
    const auto panel = random_panel(rng, 4, 200);
    const auto result = optimize_max_sharpe(panel, 1, 99, 0.019);
    const ReturnMoments moments(panel);
    const double eq = *moments.evaluate(Weights::equal(4), 0.019).sharpe;
    RandomStream s(99, 1);
    const double draw = *moments.evaluate(random_weights(4, s), 0.019).sharpe;
    CHECK(*result.stats.sharpe == std::max(eq, draw));
    CHECK(result.trial == (draw > eq ? 1u : 0u));
  }

  TEST_CASE("optimize_max_sharpe never loses to equal weight and is thread-invariant") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
      const auto panel = random_panel(rng, 4, 250);
      const auto one = optimize_max_sharpe(panel, 2000, trial, 0.019, 1);
      const auto many = optimize_max_sharpe(panel, 2000, trial, 0.019, 4);
      const double eq = *portfolio_stats(panel, Weights::equal(4), 0.019).sharpe;
      CHECK(*one.stats.sharpe >= eq);
      CHECK(one.weights.values() == many.weights.values());
      CHECK(one.trial == many.trial);
    }
    CHECK_THROWS_AS(optimize_max_sharpe(random_panel(rng, 2, 20), 0, 1), UsageError);
  }

  TEST_CASE("optimize_max_sharpe finds the dominant asset") {
    const auto panel = dominant_pair(21);
    const auto result = optimize_max_sharpe(panel, 100000, 5, 0.019);
    CHECK(result.weights[0] >= 0.95);

    // grid oracle over w in {0, 0.01, ..., 1}
    double best = -1e300, best_w = 0;
    for (int k = 0; k <= 100; ++k) {
      const double w = k / 100.0;
      const double s = brute_force_sharpe(panel, {w, 1 - w}, 0.019);
      if (s > best) {
        best = s;
        best_w = w;
      }
    }
    CHECK(best_w == 1.0);
    CHECK(std::abs(*result.stats.sharpe - best) <= 0.05);
  }

  TEST_CASE("optimize_max_sharpe fails when every trial is undefined") {
    std::vector<double> a, b;
    for (int t = 0; t < 30; ++t) {
      a.push_back(10 * std::exp(0.001 * t));
      b.push_back(20 * std::exp(0.003 * t));
    }
    CHECK_THROWS_AS(optimize_max_sharpe(make_panel({a, b}), 10, 1), NumericError);
  }

  TEST_CASE("rank_and_group by return") {
    std::vector<std::vector<double>> cols;
    const double growth[] = {0.001, 0.004, 0.002, 0.006, 0.003, 0.005};
    std::mt19937_64 rng(15);
    std::normal_distribution<double> z(0.0, 0.0001);
    for (double g : growth) {
      std::vector<double> p{10};
      for (int t = 1; t < 60; ++t) p.push_back(p.back() * std::exp(g + z(rng)));
      cols.push_back(p);
    }
    const auto panel = make_panel(cols);  // tickers A0..A5
    const auto grouping = rank_and_group(panel, RankMetric::return_annual, 0.019, 6, 1);
    std::vector<std::string> order;
    for (const auto& g : grouping.groups) order.push_back(g.front());
    CHECK(order == std::vector<std::string>{"A3", "A5", "A1", "A4", "A2", "A0"});

    CHECK_THROWS_AS(rank_and_group(panel, RankMetric::return_annual, 0.019, 4, 2), UsageError);
  }

  TEST_CASE("rank_and_group by risk is descending") {
    std::mt19937_64 rng(16);
    const auto panel = make_panel({testsupport::random_walk_prices(rng, 400, 0, 0.1 / std::sqrt(252.0)),
                                   testsupport::random_walk_prices(rng, 400, 0, 0.3 / std::sqrt(252.0)),
                                   testsupport::random_walk_prices(rng, 400, 0, 0.2 / std::sqrt(252.0))});
    const auto grouping = rank_and_group(panel, RankMetric::risk, 0.019, 3, 1);
    CHECK(grouping.groups[0][0] == "A1");
    CHECK(grouping.groups[1][0] == "A2");
    CHECK(grouping.groups[2][0] == "A0");
  }

  TEST_CASE("rank_and_group breaks ties by ticker") {
    std::mt19937_64 rng(17);
    const auto p = testsupport::random_walk_prices(rng, 50, 0.001, 0.01);
    const PricePanel panel({"ZZZ", "AAA"}, testsupport::weekdays(Date(2019, 1, 1), 50),
                           [&] {
                             std::vector<double> m;
                             for (double v : p) {
                               m.push_back(v);
                               m.push_back(v);
                             }
                             return m;
                           }());
    const auto grouping = rank_and_group(panel, RankMetric::sharpe, 0.019, 2, 1);
    CHECK(grouping.groups[0][0] == "AAA");
    CHECK(grouping.groups[1][0] == "ZZZ");
  }

  TEST_CASE("rank_and_group partitions the universe in sorted order") {
    std::mt19937_64 rng(18);
    for (auto metric : {RankMetric::return_annual, RankMetric::risk, RankMetric::sharpe}) {
      const auto panel = random_panel(rng, 12, 100);
      const auto grouping = rank_and_group(panel, metric, 0.019, 3, 4);
      REQUIRE(grouping.groups.size() == 3);
      std::vector<std::string> all;
      for (const auto& g : grouping.groups) {
        CHECK(g.size() == 4);
        all.insert(all.end(), g.begin(), g.end());
      }
      for (std::size_t i = 1; i < grouping.ranking.size(); ++i) {
        CHECK(grouping.ranking[i - 1].value >= grouping.ranking[i].value);
        CHECK(all[i] == grouping.ranking[i].ticker);
      }
      std::sort(all.begin(), all.end());
      auto tickers = panel.tickers();
      std::sort(tickers.begin(), tickers.end());
      CHECK(all == tickers);
    }
  }

  TEST_CASE("parse_rank_metric") {
    CHECK(parse_rank_metric("risk") == RankMetric::risk);
    CHECK(to_string(RankMetric::return_annual) == "return");
    CHECK_THROWS_AS(parse_rank_metric("beta"), UsageError);
  }
}
