#pragma once
// One finite-difference scenario per differentiable op plus the composed
// caption+image loss. Each case builds fresh random inputs from a seed.

#include <functional>
#include <string>
#include <vector>

#include "support/gradcheck.hpp"
#include "support/synthetic.hpp"
#include "vgs/ad/ops.hpp"
#include "vgs/model/encoders.hpp"

namespace testing {

struct GradCase {
  std::string name;
  std::function<GradCheckResult(std::uint64_t seed)> run;
};

namespace detail {

using vgs::ad::Var;

inline Var<double> rand_param(vgs::ad::Shape shape, vgs::Rng& rng, double scale = 1.0) {
  const std::size_t n = vgs::ad::shape_size(shape);
  return vgs::ad::parameter(vgs::ad::Tensor<double>(std::move(shape), random_values(n, rng, scale)));
}

// Contracts an op's output with fixed random weights so every output entry
// matters to the scalar loss.
inline GradCheckResult check_op(vgs::Rng& rng, const std::vector<NamedVar>& inputs,
                                const std::function<Var<double>()>& op) {
  const auto probe = op();
  const vgs::ad::Tensor<double> weights(probe->shape(), random_values(probe->tensor.size(), rng));
  return grad_check(inputs, [&] { return vgs::ad::weighted_sum(op(), weights); });
}

}  // namespace detail

inline vgs::model::EncoderConfig tiny_encoder_config() {
  vgs::model::EncoderConfig cfg;
  cfg.conv_channels = 4;
  cfg.lstm_hidden = 3;
  cfg.attention_hidden = 4;
  cfg.embed_dim = 5;
  cfg.image_dim = 8;
  return cfg;
}

inline std::vector<GradCase> gradient_cases() {
  using namespace vgs;
  using detail::check_op;
  using detail::rand_param;
  std::vector<GradCase> cases;

  cases.push_back({"sum", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto x = rand_param({3, 4}, rng);
                     return grad_check({{"x", x}}, [&] { return ad::sum(x); });
                   }});
  cases.push_back({"weighted_sum", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto x = rand_param({7}, rng);
                     const ad::Tensor<double> w({7}, random_values(7, rng));
                     return grad_check({{"x", x}}, [&] { return ad::weighted_sum(x, w); });
                   }});
  cases.push_back({"conv1d", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t stride = 1 + seed % 2, pad = seed % 3;
                     auto x = rand_param({9, 3}, rng), k = rand_param({4, 3, 5}, rng), b = rand_param({5}, rng);
                     return check_op(rng, {{"x", x}, {"kernel", k}, {"bias", b}},
                                     [&] { return ad::conv1d(x, k, b, stride, pad); });
                   }});
  cases.push_back({"conv1d_no_bias", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto x = rand_param({8, 2}, rng), k = rand_param({3, 2, 4}, rng);
                     return check_op(rng, {{"x", x}, {"kernel", k}},
                                     [&] { return ad::conv1d<double>(x, k, nullptr, 2, 1); });
                   }});
  for (bool reverse : {false, true}) {
    cases.push_back({reverse ? "lstm_backward_direction" : "lstm_forward_direction", [reverse](std::uint64_t seed) {
                       Rng rng(seed);
                       const std::size_t h = 3;
                       auto x = rand_param({5, 4}, rng), wi = rand_param({4 * h, 4}, rng, 0.6),
                            wh = rand_param({4 * h, h}, rng, 0.6), b = rand_param({4 * h}, rng, 0.5);
                       return check_op(rng, {{"x", x}, {"w_ih", wi}, {"w_hh", wh}, {"bias", b}},
                                       [&] { return ad::lstm_direction(x, wi, wh, b, reverse); });
                     }});
  }
  cases.push_back({"concat_cols", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto a = rand_param({4, 2}, rng), b = rand_param({4, 3}, rng);
                     return check_op(rng, {{"a", a}, {"b", b}}, [&] { return ad::concat_cols(a, b); });
                   }});
  cases.push_back({"attention_pool", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto h = rand_param({6, 4}, rng), w1 = rand_param({3, 4}, rng), b1 = rand_param({3}, rng),
                          w2 = rand_param({3}, rng);
                     return check_op(rng, {{"h", h}, {"w1", w1}, {"b1", b1}, {"w2", w2}},
                                     [&] { return ad::attention_pool(h, w1, b1, w2); });
                   }});
  cases.push_back({"linear_vector", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto x = rand_param({4}, rng), w = rand_param({3, 4}, rng), b = rand_param({3}, rng);
                     return check_op(rng, {{"x", x}, {"w", w}, {"bias", b}}, [&] { return ad::linear(x, w, b); });
                   }});
  cases.push_back({"linear_matrix", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto x = rand_param({5, 4}, rng), w = rand_param({3, 4}, rng);
                     return check_op(rng, {{"x", x}, {"w", w}}, [&] { return ad::linear<double>(x, w, nullptr); });
                   }});
  cases.push_back({"l2_normalize", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto v = rand_param({6}, rng), m = rand_param({3, 4}, rng);
                     const ad::Tensor<double> w({3, 4}, random_values(12, rng));
                     const ad::Tensor<double> wv({6}, random_values(6, rng));
                     return grad_check({{"vector", v}, {"matrix", m}}, [&] {
                       auto a = ad::weighted_sum(ad::l2_normalize(v), wv);
                       auto b = ad::weighted_sum(ad::l2_normalize(m), w);
                       return ad::sum(ad::concat_cols(ad::stack_rows<double>({a}), ad::stack_rows<double>({b})));
                     });
                   }});
  cases.push_back({"stack_rows", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto a = rand_param({3}, rng), b = rand_param({3}, rng), c = rand_param({3}, rng);
                     return check_op(rng, {{"a", a}, {"b", b}, {"c", c}}, [&] { return ad::stack_rows<double>({a, b, c}); });
                   }});
  cases.push_back({"matmul_nt", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto a = rand_param({3, 4}, rng), b = rand_param({5, 4}, rng);
                     return check_op(rng, {{"a", a}, {"b", b}}, [&] { return ad::matmul_nt(a, b); });
                   }});
  cases.push_back({"cosine_sim_matrix", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto a = rand_param({3, 4}, rng), b = rand_param({5, 4}, rng);
                     return check_op(rng, {{"a", a}, {"b", b}}, [&] { return ad::cosine_sim_matrix(a, b); });
                   }});
  cases.push_back({"batch_hinge_loss", [](std::uint64_t seed) {
                     Rng rng(seed);
                     auto s = rand_param({4, 4}, rng, 0.3);
                     return grad_check({{"S", s}}, [&] { return ad::batch_hinge_loss(s, 0.2); });
                   }});
  cases.push_back({"caption_image_model_loss", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const auto cfg = tiny_encoder_config();
                     model::VgsModel<double> m(cfg, seed);
                     std::vector<Matrix<double>> captions;
                     std::vector<std::vector<double>> images;
                     for (std::size_t i = 0; i < 2; ++i) {
                       captions.push_back(random_matrix<double>(10 + 2 * i, cfg.feature_dim, rng));
                       images.push_back(random_values(cfg.image_dim, rng));
                     }
                     std::vector<NamedVar> params;
                     for (const auto& p : m.parameters()) params.push_back({p.name, p.var});
                     // A wide margin keeps most hinges active so every parameter gets a gradient.
                     return grad_check(params, [&] {
                       std::vector<ad::Var<double>> c, v;
                       for (std::size_t i = 0; i < 2; ++i) {
                         c.push_back(m.encode_caption(captions[i]));
                         v.push_back(m.encode_image(images[i]));
                       }
                       return ad::batch_hinge_loss(ad::matmul_nt(ad::stack_rows(c), ad::stack_rows(v)), 1.0);
                     });
                   }});
  return cases;
}

}  // namespace testing
