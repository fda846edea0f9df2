#pragma once
// Differentiable ops used by the caption and image encoders and the
// training loss. Matrices are rank-2 tensors stored row-major; sequences are
// time-major (frames x channels).

#include <vector>

#include "vgs/ad/tensor.hpp"

namespace vgs::ad {

template <typename T>
Var<T> sum(const Var<T>& x);

/// sum(x * weights) for a fixed weight tensor of the same size.
template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights);

/// 1-d cross-correlation along time.
/// x: T x C_in, kernel: K x C_in x C_out, bias: C_out (may be null).
/// Output has floor((T + 2*padding - K) / stride) + 1 rows.
template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& kernel, const Var<T>& bias, std::size_t stride,
              std::size_t padding);

/// One direction of one LSTM layer over a T x C sequence; returns T x H.
/// Gate rows are ordered input, forget, cell candidate, output:
/// w_ih: 4H x C, w_hh: 4H x H, bias: 4H. With `reverse` the sequence is
/// consumed from the last frame to the first, and output row t still
/// corresponds to input row t.
template <typename T>
Var<T> lstm_direction(const Var<T>& x, const Var<T>& w_ih, const Var<T>& w_hh,
                      const Var<T>& bias, bool reverse);

/// Column-wise concatenation of two matrices with equal row counts.
template <typename T>
Var<T> concat_cols(const Var<T>& a, const Var<T>& b);

/// Additive attention pooling of h (T x D) into one D-vector:
/// score_t = w2 . tanh(W1 h_t + b1), weights = softmax(score).
/// w1: A x D, b1: A, w2: A. The softmax weights are written to
/// `weights_out` when it is non-null.
template <typename T>
Var<T> attention_pool(const Var<T>& h, const Var<T>& w1, const Var<T>& b1, const Var<T>& w2,
                      std::vector<T>* weights_out = nullptr);

/// x W^T + b for x of shape D or n x D, W of shape O x D. bias may be null.
template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& bias);

/// Scales every row (or the single vector) to unit L2 norm. Zero-norm rows
/// are rejected; NaN input propagates.
template <typename T>
Var<T> l2_normalize(const Var<T>& x);

/// Stacks equal-length vectors into an n x D matrix.
template <typename T>
Var<T> stack_rows(const std::vector<Var<T>>& rows);

/// A B^T for A: n x d, B: m x d.
template <typename T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b);

/// Cosine similarity between every row of A and every row of B.
template <typename T>
Var<T> cosine_sim_matrix(const Var<T>& a, const Var<T>& b);

/// Bidirectional hinge loss over in-batch negatives. S is B x B with
/// captions along rows and images along columns; the diagonal holds matched
/// pairs.
/// L = sum_j sum_{k != j} max(0, margin - S_jj + S_jk) + max(0, margin - S_jj + S_kj)
template <typename T>
Var<T> batch_hinge_loss(const Var<T>& s, T margin);

}  // namespace vgs::ad
