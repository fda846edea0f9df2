#pragma once
// Reverse-mode differentiation over coarse-grained ops.
//
// A Var is a node in a dynamically recorded graph. Each op computes its value
// eagerly and, when any input requires a gradient, attaches a closure that
// maps the node's output gradient onto its inputs. backward() runs those
// closures in reverse topological order. Parameters are leaf nodes whose
// gradients persist (and accumulate) until zero_grad().

#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgs::ad {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape);

template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0))
      : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_size(shape_)) {
      throw std::invalid_argument("tensor values do not match shape " + shape_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return values_.size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool has_grad() const { return !grad_.empty() || values_.empty(); }
  std::span<T> grad() {
    ensure_grad();
    return grad_;
  }
  std::span<const T> grad() const { return grad_; }
  void ensure_grad() {
    if (grad_.size() != values_.size()) grad_.assign(values_.size(), T(0));
  }
  void zero_grad() { grad_.assign(values_.size(), T(0)); }
  void drop_grad() { grad_.clear(); }

 private:
  Shape shape_;
  std::vector<T> values_;
  std::vector<T> grad_;
};

template <typename T>
struct Node;

template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
struct Node {
  Tensor<T> tensor;
  bool requires_grad = false;
  std::vector<Var<T>> parents;
  std::function<void(Node&)> backward_fn;
  // Set once this node's backward closure has run; a consumed graph cannot
  // be differentiated again without a fresh forward pass.
  bool consumed = false;

  bool is_leaf() const { return parents.empty(); }
  const Shape& shape() const { return tensor.shape(); }
  std::span<const T> values() const { return tensor.values(); }
  std::span<T> grad() { return tensor.grad(); }
};

/// Trainable leaf.
template <typename T>
Var<T> parameter(Tensor<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->tensor = std::move(value);
  node->requires_grad = true;
  node->tensor.zero_grad();
  return node;
}

/// Leaf that never receives a gradient.
template <typename T>
Var<T> constant(Tensor<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->tensor = std::move(value);
  return node;
}

/// Differentiates a scalar node, accumulating into every reachable leaf that
/// requires a gradient. Throws std::logic_error when the graph has already
/// been differentiated.
template <typename T>
void backward(const Var<T>& loss);

}  // namespace vgs::ad
