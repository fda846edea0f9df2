#pragma once
// The two halves of the joint embedding model.
//
// Caption encoder: conv1d over MFCC frames -> stacked bidirectional LSTM ->
// additive attention pooling -> linear map -> L2 normalization.
// Image encoder: one affine projection of a precomputed image feature vector
// followed by L2 normalization. Both land on the unit sphere, so cosine
// similarity between a caption and an image is a dot product.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vgs/ad/tensor.hpp"
#include "vgs/core/matrix.hpp"
#include "vgs/dsp/features.hpp"

namespace vgs {
class Rng;
}

namespace vgs::model {

struct EncoderConfig {
  std::size_t feature_dim = dsp::kFeatureWidth;
  std::size_t conv_channels = 64;
  std::size_t conv_kernel = 6;
  std::size_t conv_stride = 2;
  std::size_t conv_padding = 2;
  std::size_t lstm_layers = 4;
  std::size_t lstm_hidden = 1024;  // per direction
  std::size_t attention_hidden = 128;
  std::size_t embed_dim = 2048;
  std::size_t image_dim = 2048;

  void validate() const;
  /// Fewest input frames the conv layer accepts.
  std::size_t min_frames() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

template <typename T>
struct NamedParameter {
  std::string name;
  ad::Var<T> var;
};

template <typename T>
class VgsModel {
 public:
  VgsModel(EncoderConfig config, std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  /// Every trainable tensor in a fixed order.
  const std::vector<NamedParameter<T>>& parameters() const { return params_; }
  std::vector<ad::Var<T>> parameter_vars() const;
  std::size_t parameter_count() const;
  const ad::Var<T>& parameter(const std::string& name) const;
  void zero_grad();

  /// Records the caption encoder on the autodiff graph. `features` is
  /// frames x feature_dim. When `attention` is non-null it receives the
  /// pooling weights.
  ad::Var<T> encode_caption(const Matrix<T>& features, std::vector<T>* attention = nullptr) const;
  ad::Var<T> encode_caption(const dsp::AudioFeatures& features, std::vector<T>* attention = nullptr) const;
  ad::Var<T> encode_image(std::span<const T> image_features) const;

  /// Inference helpers returning plain unit vectors.
  std::vector<T> embed_caption(const dsp::AudioFeatures& features) const;
  std::vector<T> embed_image(std::span<const float> image_features) const;

  /// Copy with parameters converted to another precision.
  template <typename U>
  VgsModel<U> cast() const;

  /// Copies parameter values from `other`, which must share the layout.
  void copy_values_from(const VgsModel& other);

 private:
  struct LstmParams {
    ad::Var<T> w_ih, w_hh, bias;
  };
  ad::Var<T> add(const std::string& name, ad::Shape shape, double bound, Rng& rng);

  EncoderConfig config_;
  std::uint64_t seed_;
  std::vector<NamedParameter<T>> params_;

  ad::Var<T> conv_w_, conv_b_;
  std::vector<LstmParams> forward_, backward_;
  ad::Var<T> att_w1_, att_b1_, att_w2_;
  ad::Var<T> out_w_, out_b_;
  ad::Var<T> image_w_, image_b_;

  template <typename U>
  friend class VgsModel;
};

}  // namespace vgs::model
