#include "vgs/eval/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgs::eval {

namespace {

struct Moments {
  double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
};

Moments centered_moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: inputs differ in length");
  if (x.size() < 3) throw std::invalid_argument("pearson: needs at least 3 observations");
  const Moments m = centered_moments(x, y);
  if (!(m.sxx > 0.0) || !(m.syy > 0.0)) throw std::invalid_argument("pearson: constant input, correlation undefined");
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

ConfidenceInterval fisher_ci(double r, std::size_t n, double level) {
  if (n < 4) throw std::invalid_argument("fisher_ci: needs n >= 4");
  if (!(std::abs(r) < 1.0)) throw std::invalid_argument("fisher_ci: |r| must be < 1");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("fisher_ci: level must lie in (0, 1)");
  const double z_crit = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
  const double z = std::atanh(r);
  const double half = z_crit / std::sqrt(static_cast<double>(n) - 3.0);
  return {std::tanh(z - half), std::tanh(z + half)};
}

RegressionFit aic_regression(std::span<const double> human, std::span<const double> model_sims) {
  if (human.size() != model_sims.size()) throw std::invalid_argument("aic_regression: inputs differ in length");
  if (human.size() < 4) throw std::invalid_argument("aic_regression: needs at least 4 observations");
  const Moments m = centered_moments(model_sims, human);
  if (!(m.sxx > 0.0)) throw std::invalid_argument("aic_regression: constant regressor");
  RegressionFit fit;
  fit.n = human.size();
  fit.slope = m.sxy / m.sxx;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < human.size(); ++i) {
    const double e = human[i] - (fit.intercept + fit.slope * model_sims[i]);
    rss += e * e;
  }
  const auto n = static_cast<double>(fit.n);
  fit.sigma2 = rss / n;
  // Residuals at rounding level relative to the spread of y count as a perfect fit.
  if (!(rss > 1e-20 * m.syy)) throw std::invalid_argument("aic_regression: perfect fit, likelihood is degenerate");
  fit.log_likelihood = -0.5 * n * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0);
  fit.aic = 2.0 * kRegressionParams - 2.0 * fit.log_likelihood;
  return fit;
}

std::vector<AicRow> compare_aic(std::vector<AicRow> rows) {
  if (rows.empty()) throw std::invalid_argument("compare_aic: no models");
  for (const auto& r : rows) {
    if (r.n != rows.front().n) {
      throw std::invalid_argument("compare_aic: model " + r.model + " was fit on " + std::to_string(r.n) +
                                  " observations, " + rows.front().model + " on " + std::to_string(rows.front().n));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const AicRow& a, const AicRow& b) {
    return a.aic != b.aic ? a.aic < b.aic : a.model < b.model;
  });
  const double best = rows.front().aic;
  for (auto& r : rows) r.delta_aic = r.aic - best;
  return rows;
}

}  // namespace vgs::eval
