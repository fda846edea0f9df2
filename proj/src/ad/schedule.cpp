#include "vgs/ad/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgs::ad {

void LrSchedule::validate() const {
  if (!(lr_min > 0.0 && lr_min < lr_max)) {
    throw std::invalid_argument("lr schedule: requires 0 < lr_min < lr_max");
  }
  if (!(cycle_epochs > 0.0)) throw std::invalid_argument("lr schedule: cycle_epochs must be positive");
}

double lr_at(const LrSchedule& schedule, double epoch_fraction) {
  if (!(epoch_fraction >= 0.0)) throw std::invalid_argument("lr_at: epoch_fraction must be >= 0");
  const double phase = std::fmod(epoch_fraction, schedule.cycle_epochs) / schedule.cycle_epochs;
  double level = 0.0;  // 1 at lr_max, 0 at lr_min
  switch (schedule.shape) {
    case LrShape::kCosine:
      level = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * phase));
      break;
    case LrShape::kTriangular:
      level = std::abs(1.0 - 2.0 * phase);
      break;
  }
  const double lr = schedule.lr_min + (schedule.lr_max - schedule.lr_min) * level;
  return std::clamp(lr, schedule.lr_min, schedule.lr_max);
}

}  // namespace vgs::ad
