#include "vgs/model/encoders.hpp"

#include <cmath>
#include <stdexcept>

#include "vgs/ad/ops.hpp"
#include "vgs/core/random.hpp"

namespace vgs::model {

void EncoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("encoder config: " + what); };
  if (feature_dim == 0) fail("feature_dim must be positive");
  if (conv_channels == 0 || conv_kernel == 0 || conv_stride == 0) fail("conv sizes must be positive");
  if (lstm_layers == 0 || lstm_hidden == 0) fail("lstm sizes must be positive");
  if (attention_hidden == 0) fail("attention_hidden must be positive");
  if (embed_dim == 0) fail("embed_dim must be positive");
  if (image_dim == 0) fail("image_dim must be positive");
}

std::size_t EncoderConfig::min_frames() const {
  return conv_kernel > 2 * conv_padding ? conv_kernel - 2 * conv_padding : 1;
}

template <typename T>
ad::Var<T> VgsModel<T>::add(const std::string& name, ad::Shape shape, double bound, Rng& rng) {
  ad::Tensor<T> value(std::move(shape));
  for (T& v : value.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  auto var = ad::parameter(std::move(value));
  params_.push_back({name, var});
  return var;
}

template <typename T>
VgsModel<T>::VgsModel(EncoderConfig config, std::uint64_t seed) : config_(config), seed_(seed) {
  config_.validate();
  Rng rng(derive_seed(seed, 0x6d6f64656cULL));
  const auto& c = config_;
  const double conv_bound = 1.0 / std::sqrt(static_cast<double>(c.conv_kernel * c.feature_dim));
  conv_w_ = add("caption.conv.weight", {c.conv_kernel, c.feature_dim, c.conv_channels}, conv_bound, rng);
  conv_b_ = add("caption.conv.bias", {c.conv_channels}, conv_bound, rng);

  const double lstm_bound = 1.0 / std::sqrt(static_cast<double>(c.lstm_hidden));
  const std::size_t gates = 4 * c.lstm_hidden;
  for (std::size_t layer = 0; layer < c.lstm_layers; ++layer) {
    const std::size_t in = layer == 0 ? c.conv_channels : 2 * c.lstm_hidden;
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string prefix = "caption.lstm" + std::to_string(layer) + "." + dir + ".";
      LstmParams p;
      p.w_ih = add(prefix + "w_ih", {gates, in}, lstm_bound, rng);
      p.w_hh = add(prefix + "w_hh", {gates, c.lstm_hidden}, lstm_bound, rng);
      p.bias = add(prefix + "bias", {gates}, lstm_bound, rng);
      (std::string(dir) == "fwd" ? forward_ : backward_).push_back(p);
    }
  }

  const std::size_t pooled = 2 * c.lstm_hidden;
  att_w1_ = add("caption.attention.w1", {c.attention_hidden, pooled}, 1.0 / std::sqrt(double(pooled)), rng);
  att_b1_ = add("caption.attention.b1", {c.attention_hidden}, 1.0 / std::sqrt(double(pooled)), rng);
  att_w2_ = add("caption.attention.w2", {c.attention_hidden}, 1.0 / std::sqrt(double(c.attention_hidden)), rng);
  out_w_ = add("caption.out.weight", {c.embed_dim, pooled}, 1.0 / std::sqrt(double(pooled)), rng);
  out_b_ = add("caption.out.bias", {c.embed_dim}, 1.0 / std::sqrt(double(pooled)), rng);

  const double image_bound = 1.0 / std::sqrt(static_cast<double>(c.image_dim));
  image_w_ = add("image.weight", {c.embed_dim, c.image_dim}, image_bound, rng);
  image_b_ = add("image.bias", {c.embed_dim}, image_bound, rng);
}

template <typename T>
std::vector<ad::Var<T>> VgsModel<T>::parameter_vars() const {
  std::vector<ad::Var<T>> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.var);
  return out;
}

template <typename T>
std::size_t VgsModel<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.var->tensor.size();
  return n;
}

template <typename T>
const ad::Var<T>& VgsModel<T>::parameter(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.var;
  }
  throw std::out_of_range("model has no parameter named " + name);
}

template <typename T>
void VgsModel<T>::zero_grad() {
  for (auto& p : params_) p.var->tensor.zero_grad();
}

template <typename T>
ad::Var<T> VgsModel<T>::encode_caption(const Matrix<T>& features, std::vector<T>* attention) const {
  if (features.cols() != config_.feature_dim) {
    throw std::invalid_argument("caption features have " + std::to_string(features.cols()) +
                                " columns, model expects " + std::to_string(config_.feature_dim));
  }
  if (features.rows() < config_.min_frames()) {
    throw std::invalid_argument("caption has " + std::to_string(features.rows()) +
                                " frames; the conv layer needs at least " + std::to_string(config_.min_frames()));
  }
  auto x = ad::constant(ad::Tensor<T>({features.rows(), features.cols()}, features.storage()));
  auto h = ad::conv1d(x, conv_w_, conv_b_, config_.conv_stride, config_.conv_padding);
  for (std::size_t layer = 0; layer < config_.lstm_layers; ++layer) {
    const auto& f = forward_[layer];
    const auto& b = backward_[layer];
    auto fwd = ad::lstm_direction(h, f.w_ih, f.w_hh, f.bias, false);
    auto bwd = ad::lstm_direction(h, b.w_ih, b.w_hh, b.bias, true);
    h = ad::concat_cols(fwd, bwd);
  }
  auto pooled = ad::attention_pool(h, att_w1_, att_b1_, att_w2_, attention);
  return ad::l2_normalize(ad::linear(pooled, out_w_, out_b_));
}

template <typename T>
ad::Var<T> VgsModel<T>::encode_caption(const dsp::AudioFeatures& features, std::vector<T>* attention) const {
  if constexpr (std::is_same_v<T, float>) {
    return encode_caption(features.frames, attention);
  } else {
    return encode_caption(features.frames.template cast<T>(), attention);
  }
}

template <typename T>
ad::Var<T> VgsModel<T>::encode_image(std::span<const T> image_features) const {
  if (image_features.size() != config_.image_dim) {
    throw std::invalid_argument("image feature vector has " + std::to_string(image_features.size()) +
                                " entries, model expects " + std::to_string(config_.image_dim));
  }
  for (T v : image_features) {
    if (!std::isfinite(v)) throw std::invalid_argument("image feature vector has a non-finite entry");
  }
  auto x = ad::constant(ad::Tensor<T>({image_features.size()},
                                      std::vector<T>(image_features.begin(), image_features.end())));
  return ad::l2_normalize(ad::linear(x, image_w_, image_b_));
}

template <typename T>
std::vector<T> VgsModel<T>::embed_caption(const dsp::AudioFeatures& features) const {
  auto out = encode_caption(features);
  return {out->values().begin(), out->values().end()};
}

template <typename T>
std::vector<T> VgsModel<T>::embed_image(std::span<const float> image_features) const {
  const std::vector<T> converted(image_features.begin(), image_features.end());
  auto out = encode_image(converted);
  return {out->values().begin(), out->values().end()};
}

template <typename T>
template <typename U>
VgsModel<U> VgsModel<T>::cast() const {
  VgsModel<U> out(config_, seed_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto src = params_[i].var->values();
    auto dst = out.params_[i].var->tensor.values();
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<U>(src[j]);
  }
  return out;
}

template <typename T>
void VgsModel<T>::copy_values_from(const VgsModel& other) {
  if (!(other.config_ == config_)) throw std::invalid_argument("copy_values_from: architecture mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto src = other.params_[i].var->values();
    auto dst = params_[i].var->tensor.values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

template class VgsModel<float>;
template class VgsModel<double>;
template VgsModel<double> VgsModel<float>::cast<double>() const;
template VgsModel<float> VgsModel<double>::cast<float>() const;
template VgsModel<float> VgsModel<float>::cast<float>() const;

}  // namespace vgs::model
