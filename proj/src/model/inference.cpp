#include "vgs/model/inference.hpp"

#include <algorithm>

#include "vgs/core/parallel.hpp"

namespace vgs::model {

Matrix<float> embed_captions(const VgsModel<float>& model, std::span<const dsp::AudioFeatures> captions,
                             unsigned threads) {
  Matrix<float> out(captions.size(), model.config().embed_dim);
  parallel_for(captions.size(), threads, [&](std::size_t i) {
    const auto e = model.embed_caption(captions[i]);
    std::copy(e.begin(), e.end(), out.row(i).begin());
  });
  return out;
}

Matrix<float> embed_images(const VgsModel<float>& model, std::span<const std::vector<float>> images,
                           unsigned threads) {
  Matrix<float> out(images.size(), model.config().embed_dim);
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const auto e = model.embed_image(images[i]);
    std::copy(e.begin(), e.end(), out.row(i).begin());
  });
  return out;
}

}  // namespace vgs::model
