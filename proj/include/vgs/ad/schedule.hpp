#pragma once

namespace vgs::ad {

enum class LrShape { kCosine, kTriangular };

/// Cyclical learning rate. The cosine shape starts at lr_max, reaches lr_min
/// half way through the cycle and returns to lr_max at its end.
struct LrSchedule {
  double lr_max = 2e-4;
  double lr_min = 2e-6;
  double cycle_epochs = 4.0;
  LrShape shape = LrShape::kCosine;

  void validate() const;
};

/// Learning rate after `epoch_fraction` epochs (global_step / steps_per_epoch).
double lr_at(const LrSchedule& schedule, double epoch_fraction);

}  // namespace vgs::ad
