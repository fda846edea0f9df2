#pragma once
// Central finite differences against backward() for scalar losses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vgs/ad/tensor.hpp"

namespace testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "<name>[<index>]"
  std::size_t checked = 0;
};

struct NamedVar {
  std::string name;
  vgs::ad::Var<double> var;
};

// Relative error per element: |a - n| / max(|a|, |n|, floor). The floor keeps
// entries whose true gradient is (near) zero from dividing by rounding noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline GradCheckResult grad_check(const std::vector<NamedVar>& params,
                                  const std::function<vgs::ad::Var<double>()>& loss_fn, double step = 1e-5) {
  for (const auto& p : params) p.var->tensor.zero_grad();
  vgs::ad::backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) {
    const auto g = p.var->tensor.grad();
    analytic.emplace_back(g.begin(), g.end());
  }
  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto values = params[pi].var->tensor.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss_fn()->values()[0];
      values[i] = saved - step;
      const double down = loss_fn()->values()[0];
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = relative_error(analytic[pi][i], numeric);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = params[pi].name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace testing
