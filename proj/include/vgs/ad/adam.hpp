#pragma once

#include <cstdint>
#include <vector>

#include "vgs/ad/tensor.hpp"

namespace vgs::ad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moment buffers are bound to parameter order,
/// so the same parameter list must be passed to every step().
template <typename T>
class Adam {
 public:
  explicit Adam(std::vector<Var<T>> params, AdamConfig config = {});

  /// Applies one update with learning rate `lr`. Every gradient is checked
  /// first; a non-finite entry throws and leaves all parameters untouched.
  void step(double lr);
  void zero_grad();

  std::uint64_t steps() const { return steps_; }
  const std::vector<Var<T>>& params() const { return params_; }

 private:
  std::vector<Var<T>> params_;
  AdamConfig config_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::uint64_t steps_ = 0;
};

}  // namespace vgs::ad
