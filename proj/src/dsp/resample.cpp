#include "vgs/dsp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgs::dsp {

namespace {

constexpr double kZeroCrossings = 16.0;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::size_t resampled_length(std::size_t n, int from_rate, int to_rate) {
  const auto num = static_cast<long double>(n) * to_rate;
  return static_cast<std::size_t>(std::llround(num / from_rate));
}

std::vector<float> resample(std::span<const float> samples, int from_rate, int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw std::invalid_argument("resample: rates must be positive");
  if (from_rate == to_rate) return {samples.begin(), samples.end()};

  const std::size_t out_len = resampled_length(samples.size(), from_rate, to_rate);
  const double step = static_cast<double>(from_rate) / to_rate;
  const double cutoff = std::min(1.0, static_cast<double>(to_rate) / from_rate);
  const double half_width = kZeroCrossings / cutoff;
  const auto n = static_cast<std::ptrdiff_t>(samples.size());

  std::vector<float> out(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const double center = static_cast<double>(m) * step;
    const auto first = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(center - half_width)));
    const auto last = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::floor(center + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t k = first; k <= last; ++k) {
      const double tau = center - static_cast<double>(k);
      const double hann = 0.5 + 0.5 * std::cos(std::numbers::pi * tau / half_width);
      acc += samples[static_cast<std::size_t>(k)] * cutoff * sinc(cutoff * tau) * hann;
    }
    out[m] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace vgs::dsp
