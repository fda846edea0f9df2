#include "vgs/ad/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vgs::ad {

template <typename T>
Adam<T>::Adam(std::vector<Var<T>> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    if (!p || !p->requires_grad) throw std::invalid_argument("Adam: every parameter must require a gradient");
    m_.emplace_back(p->tensor.size(), T(0));
    v_.emplace_back(p->tensor.size(), T(0));
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p->tensor.zero_grad();
}

template <typename T>
void Adam<T>::step(double lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto g = params_[i]->grad();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!std::isfinite(g[j])) {
        throw std::runtime_error("Adam: non-finite gradient in parameter " + std::to_string(i) +
                                 " at index " + std::to_string(j) + "; step aborted");
      }
    }
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto values = params_[i]->tensor.values();
    auto g = params_[i]->grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * g[j]);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * g[j] * g[j]);
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] = static_cast<T>(values[j] - lr * m_hat / (std::sqrt(v_hat) + config_.epsilon));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace vgs::ad
