#include "vgs/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vgs/simd/kernels.hpp"

namespace vgs::ad {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

template <typename T>
bool needs_grad(const Var<T>& v) {
  return v && v->requires_grad;
}

template <typename T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> inputs,
                   std::function<void(Node<T>&)> backward_fn) {
  auto node = std::make_shared<Node<T>>();
  node->tensor = std::move(value);
  std::erase_if(inputs, [](const Var<T>& v) { return !v; });
  if (std::any_of(inputs.begin(), inputs.end(), [](const Var<T>& v) { return v->requires_grad; })) {
    node->requires_grad = true;
    node->parents = std::move(inputs);
    node->backward_fn = std::move(backward_fn);
  }
  return node;
}

template <typename T>
std::span<const T> row_of(std::span<const T> data, std::size_t r, std::size_t cols) {
  return data.subspan(r * cols, cols);
}

template <typename T>
std::span<T> row_of(std::span<T> data, std::size_t r, std::size_t cols) {
  return data.subspan(r * cols, cols);
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
void add_into(std::span<T> dst, std::span<const T> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

template <typename T>
Var<T> sum(const Var<T>& x) {
  T total = 0;
  for (T v : x->values()) total += v;
  return make_result<T>(Tensor<T>({1}, {total}), {x}, [x](Node<T>& self) {
    const T g = self.grad()[0];
    for (T& d : x->grad()) d += g;
  });
}

template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights) {
  require(weights.size() == x->tensor.size(), "weighted_sum: weight size mismatch");
  const T total = simd::dot<T>(x->values(), weights.values());
  return make_result<T>(Tensor<T>({1}, {total}), {x}, [x, weights](Node<T>& self) {
    simd::axpy<T>(self.grad()[0], weights.values(), x->grad());
  });
}

template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& kernel, const Var<T>& bias, std::size_t stride,
              std::size_t padding) {
  require(x->tensor.rank() == 2, "conv1d: input must be frames x channels, got " + shape_string(x->shape()));
  require(kernel->tensor.rank() == 3, "conv1d: kernel must be K x C_in x C_out, got " + shape_string(kernel->shape()));
  require(stride >= 1, "conv1d: stride must be >= 1");
  const std::size_t frames = x->tensor.dim(0);
  const std::size_t c_in = x->tensor.dim(1);
  const std::size_t k_size = kernel->tensor.dim(0);
  const std::size_t c_out = kernel->tensor.dim(2);
  require(kernel->tensor.dim(1) == c_in,
          "conv1d: kernel expects " + std::to_string(kernel->tensor.dim(1)) + " input channels, input has " +
              std::to_string(c_in));
  require(!bias || (bias->tensor.rank() == 1 && bias->tensor.dim(0) == c_out), "conv1d: bias must have C_out entries");
  require(frames + 2 * padding >= k_size,
          "conv1d: input of " + std::to_string(frames) + " frames is too short for kernel " +
              std::to_string(k_size) + " with padding " + std::to_string(padding));

  const std::size_t out_frames = (frames + 2 * padding - k_size) / stride + 1;
  const std::size_t slice = c_in * c_out;
  Tensor<T> out({out_frames, c_out});
  auto xv = x->values();
  auto kv = kernel->values();
  auto ov = out.values();
  for (std::size_t t = 0; t < out_frames; ++t) {
    auto y = row_of(ov, t, c_out);
    if (bias) std::copy(bias->values().begin(), bias->values().end(), y.begin());
    for (std::size_t k = 0; k < k_size; ++k) {
      const auto src = static_cast<std::ptrdiff_t>(t * stride + k) - static_cast<std::ptrdiff_t>(padding);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(frames)) continue;
      simd::gemv_t<T>(kv.subspan(k * slice, slice), c_in, c_out, row_of(xv, static_cast<std::size_t>(src), c_in), y);
    }
  }

  return make_result<T>(std::move(out), {x, kernel, bias},
                        [=](Node<T>& self) {
                          auto dy_all = std::span<const T>(self.grad());
                          auto xv = x->values();
                          auto kv = kernel->values();
                          for (std::size_t t = 0; t < out_frames; ++t) {
                            auto dy = row_of(dy_all, t, c_out);
                            if (needs_grad(bias)) add_into(bias->grad(), dy);
                            for (std::size_t k = 0; k < k_size; ++k) {
                              const auto src = static_cast<std::ptrdiff_t>(t * stride + k) -
                                               static_cast<std::ptrdiff_t>(padding);
                              if (src < 0 || src >= static_cast<std::ptrdiff_t>(frames)) continue;
                              const auto s = static_cast<std::size_t>(src);
                              if (x->requires_grad) {
                                simd::gemv<T>(kv.subspan(k * slice, slice), c_in, c_out, dy,
                                              row_of(x->grad(), s, c_in), true);
                              }
                              if (kernel->requires_grad) {
                                simd::ger<T>(kernel->grad().subspan(k * slice, slice), c_in, c_out, T(1),
                                             row_of(xv, s, c_in), dy);
                              }
                            }
                          }
                        });
}

template <typename T>
Var<T> lstm_direction(const Var<T>& x, const Var<T>& w_ih, const Var<T>& w_hh,
                      const Var<T>& bias, bool reverse) {
  require(x->tensor.rank() == 2, "lstm: input must be frames x channels, got " + shape_string(x->shape()));
  const std::size_t frames = x->tensor.dim(0);
  const std::size_t c_in = x->tensor.dim(1);
  require(frames >= 1, "lstm: empty input sequence");
  require(w_hh->tensor.rank() == 2 && w_hh->tensor.dim(0) == 4 * w_hh->tensor.dim(1),
          "lstm: w_hh must be 4H x H, got " + shape_string(w_hh->shape()));
  const std::size_t hidden = w_hh->tensor.dim(1);
  const std::size_t gates = 4 * hidden;
  require(w_ih->tensor.rank() == 2 && w_ih->tensor.dim(0) == gates && w_ih->tensor.dim(1) == c_in,
          "lstm: w_ih must be 4H x C, got " + shape_string(w_ih->shape()));
  require(bias->tensor.rank() == 1 && bias->tensor.dim(0) == gates, "lstm: bias must have 4H entries");

  auto act = std::make_shared<std::vector<T>>(frames * gates);   // i, f, g, o after nonlinearity
  auto cell = std::make_shared<std::vector<T>>(frames * hidden);
  auto cell_tanh = std::make_shared<std::vector<T>>(frames * hidden);
  Tensor<T> out({frames, hidden});

  auto xv = x->values();
  auto wi = w_ih->values();
  auto wh = w_hh->values();
  auto hv = out.values();
  std::vector<T> z(gates);
  auto time_at = [=](std::size_t step) { return reverse ? frames - 1 - step : step; };

  for (std::size_t step = 0; step < frames; ++step) {
    const std::size_t t = time_at(step);
    std::copy(bias->values().begin(), bias->values().end(), z.begin());
    simd::gemv<T>(wi, gates, c_in, row_of(xv, t, c_in), z, true);
    if (step > 0) simd::gemv<T>(wh, gates, hidden, row_of(std::span<const T>(hv), time_at(step - 1), hidden), z, true);
    T* a = act->data() + t * gates;
    T* c = cell->data() + t * hidden;
    T* tc = cell_tanh->data() + t * hidden;
    const T* c_prev = step > 0 ? cell->data() + time_at(step - 1) * hidden : nullptr;
    for (std::size_t j = 0; j < hidden; ++j) {
      const T i_g = sigmoid(z[j]);
      const T f_g = sigmoid(z[hidden + j]);
      const T g_g = std::tanh(z[2 * hidden + j]);
      const T o_g = sigmoid(z[3 * hidden + j]);
      a[j] = i_g;
      a[hidden + j] = f_g;
      a[2 * hidden + j] = g_g;
      a[3 * hidden + j] = o_g;
      c[j] = (c_prev ? f_g * c_prev[j] : T(0)) + i_g * g_g;
      tc[j] = std::tanh(c[j]);
      hv[t * hidden + j] = o_g * tc[j];
    }
  }

  auto h_values = std::make_shared<std::vector<T>>(hv.begin(), hv.end());
  return make_result<T>(
      std::move(out), {x, w_ih, w_hh, bias}, [=](Node<T>& self) {
        auto dy_all = std::span<const T>(self.grad());
        auto xv = x->values();
        auto wi = w_ih->values();
        auto wh = w_hh->values();
        std::vector<T> dh_next(hidden, T(0));
        std::vector<T> dc_next(hidden, T(0));
        std::vector<T> dz(gates);
        for (std::size_t step = frames; step-- > 0;) {
          const std::size_t t = time_at(step);
          const T* a = act->data() + t * gates;
          const T* tc = cell_tanh->data() + t * hidden;
          const T* c_prev = step > 0 ? cell->data() + time_at(step - 1) * hidden : nullptr;
          for (std::size_t j = 0; j < hidden; ++j) {
            const T i_g = a[j], f_g = a[hidden + j], g_g = a[2 * hidden + j], o_g = a[3 * hidden + j];
            const T dh = dy_all[t * hidden + j] + dh_next[j];
            const T d_o = dh * tc[j];
            const T dc = dc_next[j] + dh * o_g * (T(1) - tc[j] * tc[j]);
            const T d_i = dc * g_g;
            const T d_g = dc * i_g;
            const T d_f = c_prev ? dc * c_prev[j] : T(0);
            dc_next[j] = dc * f_g;
            dz[j] = d_i * i_g * (T(1) - i_g);
            dz[hidden + j] = d_f * f_g * (T(1) - f_g);
            dz[2 * hidden + j] = d_g * (T(1) - g_g * g_g);
            dz[3 * hidden + j] = d_o * o_g * (T(1) - o_g);
          }
          if (bias->requires_grad) add_into(bias->grad(), std::span<const T>(dz));
          if (w_ih->requires_grad) simd::ger<T>(w_ih->grad(), gates, c_in, T(1), dz, row_of(xv, t, c_in));
          if (x->requires_grad) simd::gemv_t<T>(wi, gates, c_in, dz, row_of(x->grad(), t, c_in));
          std::fill(dh_next.begin(), dh_next.end(), T(0));
          if (step > 0) {
            const std::span<const T> h_prev(h_values->data() + time_at(step - 1) * hidden, hidden);
            if (w_hh->requires_grad) simd::ger<T>(w_hh->grad(), gates, hidden, T(1), dz, h_prev);
            simd::gemv_t<T>(wh, gates, hidden, dz, dh_next);
          }
        }
      });
}

template <typename T>
Var<T> concat_cols(const Var<T>& a, const Var<T>& b) {
  require(a->tensor.rank() == 2 && b->tensor.rank() == 2 && a->tensor.dim(0) == b->tensor.dim(0),
          "concat_cols: row counts differ (" + shape_string(a->shape()) + " vs " + shape_string(b->shape()) + ")");
  const std::size_t rows = a->tensor.dim(0);
  const std::size_t ca = a->tensor.dim(1);
  const std::size_t cb = b->tensor.dim(1);
  Tensor<T> out({rows, ca + cb});
  for (std::size_t r = 0; r < rows; ++r) {
    auto dst = row_of(out.values(), r, ca + cb);
    auto ra = row_of(a->values(), r, ca);
    auto rb = row_of(b->values(), r, cb);
    std::copy(ra.begin(), ra.end(), dst.begin());
    std::copy(rb.begin(), rb.end(), dst.begin() + static_cast<std::ptrdiff_t>(ca));
  }
  return make_result<T>(std::move(out), {a, b}, [=](Node<T>& self) {
    auto g = std::span<const T>(self.grad());
    for (std::size_t r = 0; r < rows; ++r) {
      auto src = row_of(g, r, ca + cb);
      if (a->requires_grad) add_into(row_of(a->grad(), r, ca), src.first(ca));
      if (b->requires_grad) add_into(row_of(b->grad(), r, cb), src.subspan(ca));
    }
  });
}

template <typename T>
Var<T> attention_pool(const Var<T>& h, const Var<T>& w1, const Var<T>& b1, const Var<T>& w2,
                      std::vector<T>* weights_out) {
  require(h->tensor.rank() == 2 && h->tensor.dim(0) >= 1, "attention_pool: input must be T x D with T >= 1");
  const std::size_t frames = h->tensor.dim(0);
  const std::size_t dim = h->tensor.dim(1);
  require(w1->tensor.rank() == 2 && w1->tensor.dim(1) == dim, "attention_pool: w1 must be A x D");
  const std::size_t att = w1->tensor.dim(0);
  require(b1->tensor.size() == att && w2->tensor.size() == att, "attention_pool: b1 and w2 must have A entries");

  auto hidden = std::make_shared<std::vector<T>>(frames * att);
  auto weights = std::make_shared<std::vector<T>>(frames);
  auto hv = h->values();
  std::vector<T> scores(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::span<T> u(hidden->data() + t * att, att);
    std::copy(b1->values().begin(), b1->values().end(), u.begin());
    simd::gemv<T>(w1->values(), att, dim, row_of(hv, t, dim), u, true);
    for (T& v : u) v = std::tanh(v);
    scores[t] = simd::dot<T>(w2->values(), std::span<const T>(u));
  }
  const T max_score = *std::max_element(scores.begin(), scores.end());
  T total = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    (*weights)[t] = std::exp(scores[t] - max_score);
    total += (*weights)[t];
  }
  for (T& w : *weights) w /= total;
  if (weights_out) *weights_out = *weights;

  Tensor<T> out({dim});
  for (std::size_t t = 0; t < frames; ++t) simd::axpy<T>((*weights)[t], row_of(hv, t, dim), out.values());

  return make_result<T>(std::move(out), {h, w1, b1, w2}, [=](Node<T>& self) {
    auto dout = std::span<const T>(self.grad());
    auto hv = h->values();
    std::vector<T> d_alpha(frames);
    T mean = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      d_alpha[t] = simd::dot<T>(dout, row_of(hv, t, dim));
      mean += (*weights)[t] * d_alpha[t];
    }
    std::vector<T> dpre(att);
    for (std::size_t t = 0; t < frames; ++t) {
      const T alpha = (*weights)[t];
      const T ds = alpha * (d_alpha[t] - mean);
      if (h->requires_grad) simd::axpy<T>(alpha, dout, row_of(h->grad(), t, dim));
      const std::span<const T> u(hidden->data() + t * att, att);
      if (w2->requires_grad) simd::axpy<T>(ds, u, w2->grad());
      auto w2v = w2->values();
      for (std::size_t a = 0; a < att; ++a) dpre[a] = ds * w2v[a] * (T(1) - u[a] * u[a]);
      if (b1->requires_grad) add_into(b1->grad(), std::span<const T>(dpre));
      if (w1->requires_grad) simd::ger<T>(w1->grad(), att, dim, T(1), dpre, row_of(hv, t, dim));
      if (h->requires_grad) simd::gemv_t<T>(w1->values(), att, dim, dpre, row_of(h->grad(), t, dim));
    }
  });
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& bias) {
  require(w->tensor.rank() == 2, "linear: weight must be O x D");
  const std::size_t out_dim = w->tensor.dim(0);
  const std::size_t in_dim = w->tensor.dim(1);
  const bool vector_input = x->tensor.rank() == 1;
  require(vector_input || x->tensor.rank() == 2, "linear: input must be a vector or matrix");
  const std::size_t rows = vector_input ? 1 : x->tensor.dim(0);
  const std::size_t x_dim = vector_input ? x->tensor.dim(0) : x->tensor.dim(1);
  require(x_dim == in_dim, "linear: input has " + std::to_string(x_dim) + " features, weight expects " +
                               std::to_string(in_dim));
  require(!bias || bias->tensor.size() == out_dim, "linear: bias must have O entries");

  Tensor<T> out(vector_input ? Shape{out_dim} : Shape{rows, out_dim});
  for (std::size_t r = 0; r < rows; ++r) {
    auto y = row_of(out.values(), r, out_dim);
    if (bias) std::copy(bias->values().begin(), bias->values().end(), y.begin());
    simd::gemv<T>(w->values(), out_dim, in_dim, row_of(x->values(), r, in_dim), y, true);
  }
  return make_result<T>(std::move(out), {x, w, bias}, [=](Node<T>& self) {
    auto g = std::span<const T>(self.grad());
    for (std::size_t r = 0; r < rows; ++r) {
      auto dy = row_of(g, r, out_dim);
      if (needs_grad(bias)) add_into(bias->grad(), dy);
      if (w->requires_grad) simd::ger<T>(w->grad(), out_dim, in_dim, T(1), dy, row_of(x->values(), r, in_dim));
      if (x->requires_grad) simd::gemv_t<T>(w->values(), out_dim, in_dim, dy, row_of(x->grad(), r, in_dim));
    }
  });
}

template <typename T>
Var<T> l2_normalize(const Var<T>& x) {
  const bool vector_input = x->tensor.rank() == 1;
  require(vector_input || x->tensor.rank() == 2, "l2_normalize: input must be a vector or matrix");
  const std::size_t rows = vector_input ? 1 : x->tensor.dim(0);
  const std::size_t cols = vector_input ? x->tensor.dim(0) : x->tensor.dim(1);
  auto norms = std::make_shared<std::vector<T>>(rows);
  Tensor<T> out(x->shape());
  for (std::size_t r = 0; r < rows; ++r) {
    auto src = row_of(x->values(), r, cols);
    const T n = std::sqrt(simd::dot<T>(src, src));
    // NaN passes through so callers can report it where it becomes a loss.
    require(n != T(0), "l2_normalize: row " + std::to_string(r) + " has zero norm");
    (*norms)[r] = n;
    auto dst = row_of(out.values(), r, cols);
    for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c] / n;
  }
  auto y = std::make_shared<std::vector<T>>(out.values().begin(), out.values().end());
  return make_result<T>(std::move(out), {x}, [=](Node<T>& self) {
    auto g = std::span<const T>(self.grad());
    for (std::size_t r = 0; r < rows; ++r) {
      auto dy = row_of(g, r, cols);
      const std::span<const T> yr(y->data() + r * cols, cols);
      const T proj = simd::dot<T>(yr, dy);
      auto dx = row_of(x->grad(), r, cols);
      const T inv = T(1) / (*norms)[r];
      for (std::size_t c = 0; c < cols; ++c) dx[c] += (dy[c] - yr[c] * proj) * inv;
    }
  });
}

template <typename T>
Var<T> stack_rows(const std::vector<Var<T>>& rows) {
  require(!rows.empty(), "stack_rows: no rows");
  const std::size_t cols = rows.front()->tensor.size();
  for (const auto& r : rows) {
    require(r->tensor.rank() == 1 && r->tensor.size() == cols, "stack_rows: rows must be vectors of equal length");
  }
  Tensor<T> out({rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i]->values().begin(), rows[i]->values().end(), row_of(out.values(), i, cols).begin());
  }
  return make_result<T>(std::move(out), rows, [rows, cols](Node<T>& self) {
    auto g = std::span<const T>(self.grad());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i]->requires_grad) add_into(rows[i]->grad(), row_of(g, i, cols));
    }
  });
}

template <typename T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b) {
  require(a->tensor.rank() == 2 && b->tensor.rank() == 2 && a->tensor.dim(1) == b->tensor.dim(1),
          "matmul_nt: shapes " + shape_string(a->shape()) + " and " + shape_string(b->shape()) + " are incompatible");
  const std::size_t n = a->tensor.dim(0);
  const std::size_t m = b->tensor.dim(0);
  const std::size_t d = a->tensor.dim(1);
  Tensor<T> out({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    simd::gemv<T>(b->values(), m, d, row_of(a->values(), i, d), row_of(out.values(), i, m));
  }
  return make_result<T>(std::move(out), {a, b}, [=](Node<T>& self) {
    auto g = std::span<const T>(self.grad());
    for (std::size_t i = 0; i < n; ++i) {
      auto ds = row_of(g, i, m);
      if (a->requires_grad) simd::gemv_t<T>(b->values(), m, d, ds, row_of(a->grad(), i, d));
      if (b->requires_grad) simd::ger<T>(b->grad(), m, d, T(1), ds, row_of(a->values(), i, d));
    }
  });
}

template <typename T>
Var<T> cosine_sim_matrix(const Var<T>& a, const Var<T>& b) {
  return matmul_nt(l2_normalize(a), l2_normalize(b));
}

template <typename T>
Var<T> batch_hinge_loss(const Var<T>& s, T margin) {
  require(s->tensor.rank() == 2 && s->tensor.dim(0) == s->tensor.dim(1),
          "batch_hinge_loss: similarity matrix must be square, got " + shape_string(s->shape()));
  const std::size_t b = s->tensor.dim(0);
  auto sv = s->values();
  T total = 0;
  for (std::size_t j = 0; j < b; ++j) {
    const T diag = sv[j * b + j];
    for (std::size_t k = 0; k < b; ++k) {
      if (k == j) continue;
      // Argument order keeps a NaN similarity visible in the total.
      total += std::max(margin - diag + sv[j * b + k], T(0));
      total += std::max(margin - diag + sv[k * b + j], T(0));
    }
  }
  return make_result<T>(Tensor<T>({1}, {total}), {s}, [s, b, margin](Node<T>& self) {
    const T g = self.grad()[0];
    auto sv = s->values();
    auto ds = s->grad();
    for (std::size_t j = 0; j < b; ++j) {
      const T diag = sv[j * b + j];
      for (std::size_t k = 0; k < b; ++k) {
        if (k == j) continue;
        if (margin - diag + sv[j * b + k] > T(0)) {
          ds[j * b + k] += g;
          ds[j * b + j] -= g;
        }
        if (margin - diag + sv[k * b + j] > T(0)) {
          ds[k * b + j] += g;
          ds[j * b + j] -= g;
        }
      }
    }
  });
}

#define VGS_INSTANTIATE(T)                                                                        \
  template Var<T> sum<T>(const Var<T>&);                                                          \
  template Var<T> weighted_sum<T>(const Var<T>&, const Tensor<T>&);                               \
  template Var<T> conv1d<T>(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t, std::size_t); \
  template Var<T> lstm_direction<T>(const Var<T>&, const Var<T>&, const Var<T>&, const Var<T>&, bool); \
  template Var<T> concat_cols<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> attention_pool<T>(const Var<T>&, const Var<T>&, const Var<T>&, const Var<T>&,   \
                                    std::vector<T>*);                                             \
  template Var<T> linear<T>(const Var<T>&, const Var<T>&, const Var<T>&);                         \
  template Var<T> l2_normalize<T>(const Var<T>&);                                                 \
  template Var<T> stack_rows<T>(const std::vector<Var<T>>&);                                      \
  template Var<T> matmul_nt<T>(const Var<T>&, const Var<T>&);                                     \
  template Var<T> cosine_sim_matrix<T>(const Var<T>&, const Var<T>&);                             \
  template Var<T> batch_hinge_loss<T>(const Var<T>&, T);

VGS_INSTANTIATE(float)
VGS_INSTANTIATE(double)
#undef VGS_INSTANTIATE

}  // namespace vgs::ad
