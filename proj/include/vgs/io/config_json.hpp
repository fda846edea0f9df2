#pragma once
// JSON mappings for every user-facing configuration struct. Missing keys
// keep their defaults.

#include <json.hpp>

#include "vgs/ad/adam.hpp"
#include "vgs/ad/schedule.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/model/encoders.hpp"

namespace vgs::dsp {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FeatureConfig, sample_rate, frame_length_ms, frame_shift_ms,
                                                preemphasis, fft_size, num_mel_bins, low_freq, high_freq,
                                                log_floor, variance_floor, delta_window)
}

namespace vgs::model {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EncoderConfig, feature_dim, conv_channels, conv_kernel,
                                                conv_stride, conv_padding, lstm_layers, lstm_hidden,
                                                attention_hidden, embed_dim, image_dim)
}

namespace vgs::ad {
NLOHMANN_JSON_SERIALIZE_ENUM(LrShape, {{LrShape::kCosine, "cosine"}, {LrShape::kTriangular, "triangular"}})
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LrSchedule, lr_max, lr_min, cycle_epochs, shape)
}

namespace vgs::ad {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AdamConfig, beta1, beta2, epsilon)
}
