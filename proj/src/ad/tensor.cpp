#include "vgs/ad/tensor.hpp"

#include <unordered_set>

namespace vgs::ad {

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

template <typename T>
void backward(const Var<T>& loss) {
  if (!loss) throw std::invalid_argument("backward: null loss node");
  if (loss->tensor.size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                shape_string(loss->shape()));
  }
  if (loss->consumed) {
    throw std::logic_error("backward: graph already differentiated; run a new forward pass");
  }

  // Iterative post-order DFS over interior nodes that carry a closure.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->consumed) {
        throw std::logic_error("backward: graph already differentiated; run a new forward pass");
      }
      if (parent->requires_grad && !parent->is_leaf() && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  if (!loss->requires_grad) {
    loss->consumed = true;
    return;
  }
  loss->tensor.zero_grad();
  loss->tensor.grad()[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (node->backward_fn) node->backward_fn(*node);
  }
  // Release the graph from the leaves upward; each node is still owned by
  // its consumer, which comes later in `order`.
  for (Node<T>* node : order) {
    node->backward_fn = nullptr;
    node->parents.clear();
    if (node != loss.get()) node->tensor.drop_grad();
    node->consumed = true;
  }
}

template void backward<float>(const Var<float>&);
template void backward<double>(const Var<double>&);

}  // namespace vgs::ad
