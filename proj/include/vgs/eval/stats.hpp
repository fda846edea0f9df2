#pragma once
// Correlation, Fisher-z confidence intervals, and Gaussian OLS likelihoods
// for information-criterion model comparison.

#include <span>
#include <string>
#include <vector>

namespace vgs::eval {

/// Sample Pearson correlation. Needs n >= 3 and two non-constant inputs.
double pearson(std::span<const double> x, std::span<const double> y);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval tanh(atanh(r) -/+ z_crit / sqrt(n - 3)). Needs n >= 4, |r| < 1.
ConfidenceInterval fisher_ci(double r, std::size_t n, double level = 0.95);

struct RegressionFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sigma2 = 0.0;  // RSS / n
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::size_t n = 0;
};

/// Number of fitted quantities in the simple regression: intercept, slope,
/// error variance.
inline constexpr int kRegressionParams = 3;

/// OLS of `human` on `model_sims` with Gaussian errors at the ML variance.
/// LL = -(n/2)(ln(2 pi sigma2) + 1), AIC = 2k - 2 LL.
RegressionFit aic_regression(std::span<const double> human, std::span<const double> model_sims);

struct AicRow {
  std::string model;
  double aic = 0.0;
  double delta_aic = 0.0;
  double log_likelihood = 0.0;
  std::size_t n = 0;
};

/// Fills delta_aic relative to the lowest AIC and sorts ascending by AIC
/// (ties by model name). All rows must share the same n.
std::vector<AicRow> compare_aic(std::vector<AicRow> rows);

}  // namespace vgs::eval
