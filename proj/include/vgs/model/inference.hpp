#pragma once

#include <span>
#include <vector>

#include "vgs/core/matrix.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/model/encoders.hpp"

namespace vgs::model {

/// One unit-norm embedding row per caption. Rows are computed independently,
/// so the result does not depend on `threads`.
Matrix<float> embed_captions(const VgsModel<float>& model, std::span<const dsp::AudioFeatures> captions,
                             unsigned threads = 1);
Matrix<float> embed_images(const VgsModel<float>& model, std::span<const std::vector<float>> images,
                           unsigned threads = 1);

}  // namespace vgs::model
