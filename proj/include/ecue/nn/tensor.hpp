#pragma once

// Reverse-mode differentiable tensor. Values are 64-bit, row-major. Most
// operations treat a tensor as a matrix: rows() = shape[0], cols() = the
// product of the remaining extents.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ecue/error.hpp"

namespace ecue::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Pushes this node's grad into its parents.
  std::function<void(const Node&)> backward;

  std::vector<double>& grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    const auto n = shape_size(shape);
    return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false) {
    for (auto d : shape) require(d > 0, "tensor extents must be positive");
    require(values.size() == shape_size(shape),
            "tensor data size does not match shape " + shape_str(shape));
    Tensor t;
    t.node_ = std::make_shared<detail::Node>();
    t.node_->shape = std::move(shape);
    t.node_->value = std::move(values);
    t.node_->requires_grad = requires_grad;
    return t;
  }

  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values, bool requires_grad = false) {
    return from({rows, cols}, std::move(values), requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return from({1}, {v}, requires_grad);
  }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const { return node_->shape.empty() ? 1 : node_->shape[0]; }
  std::size_t cols() const { return size() / rows(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> data() const { return node_->value; }
  // Mutable access is meant for parameters and leaf inputs; editing an
  // intermediate result after use does not update its consumers.
  std::span<double> data() { return node_->value; }
  std::vector<double>& values() { return node_->value; }
  const std::vector<double>& values() const { return node_->value; }

  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> grad() { return node_->grad_buffer(); }

  double item() const {
    require(size() == 1, "item() on a non-scalar tensor");
    return node_->value[0];
  }
  double at(std::size_t r, std::size_t c) const {
    return node_->value[r * cols() + c];
  }

  void zero_grad() { node_->grad.clear(); }

  // A copy that shares nothing with the graph.
  Tensor detach() const { return from(shape(), node_->value, false); }

  // Accumulates d(this)/d(leaf) into every reachable leaf that requires grad.
  // The tensor must hold a single value.
  void backward() const {
    require(size() == 1, "backward() requires a scalar tensor");
    if (!requires_grad()) return;
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    // Iterative post-order DFS.
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [n, i] = stack.back();
      if (i < n->parents.size()) {
        auto* p = n->parents[i++].get();
        if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
    node_->grad_buffer()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto* n = *it;
      if (n->backward && n->grad.size() == n->value.size()) n->backward(*n);
    }
    // Intermediate grads are no longer needed; leaves keep theirs.
    for (auto* n : order)
      if (n->backward) n->grad.clear();
  }

  // Builds a result node. `backward` receives the result node; it reads
  // `out.grad` and accumulates into inputs via accumulate().
  static Tensor make_result(Shape shape, std::vector<double> values,
                            std::initializer_list<Tensor> inputs,
                            std::function<void(const detail::Node&)> backward) {
    Tensor t = from(std::move(shape), std::move(values), false);
    bool any = false;
    for (const auto& in : inputs) {
      if (in.requires_grad()) {
        any = true;
        t.node_->parents.push_back(in.node_);
      }
    }
    if (any) {
      t.node_->requires_grad = true;
      t.node_->backward = std::move(backward);
    }
    return t;
  }

  static Tensor make_result(Shape shape, std::vector<double> values,
                            const std::vector<Tensor>& inputs,
                            std::function<void(const detail::Node&)> backward) {
    Tensor t = from(std::move(shape), std::move(values), false);
    bool any = false;
    for (const auto& in : inputs) {
      if (in.requires_grad()) {
        any = true;
        t.node_->parents.push_back(in.node_);
      }
    }
    if (any) {
      t.node_->requires_grad = true;
      t.node_->backward = std::move(backward);
    }
    return t;
  }

  // Grad buffer of an input, or nullptr when that input needs no gradient.
  double* grad_sink() const {
    return requires_grad() ? node_->grad_buffer().data() : nullptr;
  }

  bool same_node(const Tensor& o) const { return node_ == o.node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// A named trainable tensor. Parameter lists keep registration order, which is
// also the checkpoint order.
struct NamedParam {
  std::string name;
  Tensor tensor;
};
using ParamList = std::vector<NamedParam>;

inline std::size_t parameter_count(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

inline void zero_grads(ParamList& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

}  // namespace ecue::nn
