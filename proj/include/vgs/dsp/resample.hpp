#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vgs::dsp {

/// Output length for a rate change: round(n * to / from).
std::size_t resampled_length(std::size_t n, int from_rate, int to_rate);

/// Band-limited resampling with a Hann-windowed sinc kernel. The cutoff sits
/// at the lower of the two Nyquist frequencies.
std::vector<float> resample(std::span<const float> samples, int from_rate, int to_rate);

}  // namespace vgs::dsp
