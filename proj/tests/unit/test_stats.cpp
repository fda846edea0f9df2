#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles/stats_oracle.hpp"
#include "support/synthetic.hpp"
#include "vgs/eval/stats.hpp"

using namespace vgs;

TEST_SUITE("stats") {
  TEST_CASE("pearson examples") {
    const std::vector<double> x{1, 2, 3, 5};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-2 * v + 7);
    CHECK(eval::pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval::pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
    // 8 / sqrt(8.75 * 10)
    const std::vector<double> y{2, 1, 4, 5};
    CHECK(std::abs(eval::pearson(x, y) - 0.8552359741) < 1e-9);
    CHECK(std::abs(eval::pearson(x, y) - static_cast<double>(oracle::pearson(x, y))) < 1e-12);
  }

  TEST_CASE("pearson is invariant under positive affine maps") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
      const auto x = testing::random_values(10, rng), y = testing::random_values(10, rng);
      std::vector<double> xs, ys;
      for (double v : x) xs.push_back(3.5 * v - 2);
      for (double v : y) ys.push_back(0.25 * v + 11);
      CHECK(eval::pearson(xs, ys) == doctest::Approx(eval::pearson(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("pearson rejects undefined input") {
    const std::vector<double> c{2, 2, 2, 2}, x{1, 2, 3, 4};
    CHECK_THROWS_AS(eval::pearson(c, x), std::invalid_argument);
    CHECK_THROWS_AS(eval::pearson(x, c), std::invalid_argument);
    CHECK_THROWS_AS(eval::pearson(std::vector<double>{1, 2}, std::vector<double>{2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(eval::pearson(x, std::vector<double>{1, 2, 3}), std::invalid_argument);
  }

  TEST_CASE("fisher interval examples and properties") {
    const auto ci = eval::fisher_ci(0.0, 103);
    CHECK(std::abs(ci.hi - 0.1939) < 1e-3);
    CHECK(std::abs(ci.lo + 0.1939) < 1e-3);
    CHECK(ci.hi == doctest::Approx(std::tanh(1.959963984540054 / 10)).epsilon(1e-12));
    Rng rng(6);
    for (int t = 0; t < 200; ++t) {
      const double r = rng.uniform(-0.99, 0.99);
      const std::size_t n = 4 + rng.below(500);
      const auto a = eval::fisher_ci(r, n);
      CHECK(a.lo < r);
      CHECK(r < a.hi);
      const auto b = eval::fisher_ci(r, n + 10);
      CHECK(b.hi - b.lo < a.hi - a.lo);
    }
    CHECK_THROWS_AS(eval::fisher_ci(0.1, 3), std::invalid_argument);
    CHECK_THROWS_AS(eval::fisher_ci(1.0, 50), std::invalid_argument);
    CHECK_THROWS_AS(eval::fisher_ci(-1.0, 50), std::invalid_argument);
  }

  TEST_CASE("regression likelihood matches the per-observation oracle") {
    Rng rng(7);
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = rng.uniform(0, 1);
      y[i] = 1.5 + 2.0 * x[i] + 0.3 * rng.normal();
    }
    const auto fit = eval::aic_regression(y, x);
    const auto ref = oracle::gaussian_ols(y, x);
    CHECK(std::abs(fit.intercept - static_cast<double>(ref.a)) < 1e-8);
    CHECK(std::abs(fit.slope - static_cast<double>(ref.b)) < 1e-8);
    CHECK(std::abs(fit.log_likelihood - static_cast<double>(ref.ll)) < 1e-8);
    CHECK(std::abs(fit.aic - static_cast<double>(ref.aic)) < 1e-8);
    CHECK(fit.aic == 2.0 * 3 - 2.0 * fit.log_likelihood);
    CHECK(fit.n == 20);
  }

  TEST_CASE("AIC is twice the parameter count minus twice the log likelihood") {
    CHECK(std::abs((2.0 * eval::kRegressionParams - 2.0 * -63984.23) - 127974.46) < 1e-9);
  }

  TEST_CASE("degenerate regressions are rejected") {
    const std::vector<double> x{1, 2, 3, 4, 5}, c{3, 3, 3, 3, 3};
    std::vector<double> line;
    for (double v : x) line.push_back(0.1 + 0.7 * v);
    CHECK_THROWS_AS(eval::aic_regression(x, c), std::invalid_argument);
    CHECK_THROWS_AS(eval::aic_regression(line, x), std::invalid_argument);
    CHECK_THROWS_AS(eval::aic_regression(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2}), std::invalid_argument);
  }

  TEST_CASE("compare_aic") {
    std::vector<eval::AicRow> rows{{"b", 110.0, 0, -52, 100}, {"a", 100.0, 0, -47, 100}, {"c", 105.5, 0, -49.75, 100}};
    const auto out = eval::compare_aic(rows);
    CHECK(out[0].model == "a");
    CHECK(out[0].delta_aic == 0.0);
    CHECK(out[1].model == "c");
    CHECK(out[1].delta_aic == 5.5);
    CHECK(out[2].delta_aic == 10.0);
    std::reverse(rows.begin(), rows.end());
    const auto again = eval::compare_aic(rows);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(again[i].model == out[i].model);
      CHECK(again[i].delta_aic == out[i].delta_aic);
    }
    CHECK(eval::compare_aic({{"only", 5.0, 0, -1, 10}})[0].delta_aic == 0.0);
    rows[1].n = 99;
    CHECK_THROWS_AS(eval::compare_aic(rows), std::invalid_argument);
    CHECK_THROWS_AS(eval::compare_aic({}), std::invalid_argument);
  }
}
