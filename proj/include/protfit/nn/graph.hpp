// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "protfit/nn/tensor.hpp"

namespace protfit::nn {

/// Named trainable leaf. `grad` is accumulated by Graph::backward.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Ordered parameter store. Insertion order is the canonical order used by
// checkpoints and the optimizer; references stay valid as parameters are
// added.
class ParameterSet {
 public:
  Parameter& add(std::string name, Tensor value);
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t count() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  std::size_t total_size() const;

 private:
  std::deque<Parameter> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Handle to a node of a Graph.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

// Tape for reverse-mode differentiation. Nodes are appended in evaluation
// order, so reverse insertion order is a reverse topological order and
// backward() visits each node exactly once.
class Graph {
 public:
  /// Receives the node's output gradient; accumulates into input gradients.
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var input(Tensor value, bool requires_grad);
  /// Leaf bound to a parameter; gradients flow into `p.grad` on backward.
  /// The parameter must outlive the graph.
  Var parameter(Parameter& p);
  /// Frozen leaf referencing a parameter's value; never receives gradient.
  Var parameter(const Parameter& p);

  /// Appends an operation node. `fn` is dropped when no input needs grad.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  bool grad_enabled() const { return grad_enabled_; }

  /// Gradient slot of `v`, zero-initialised on first access.
  Tensor& grad(Var v);
  /// Gradient slot if `v` requires grad, otherwise nullptr.
  Tensor* grad_if_needed(Var v) {
    return nodes_[v.id].requires_grad ? &grad(v) : nullptr;
  }

  /// Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    const Tensor* external = nullptr;
    Parameter* param = nullptr;
    BackwardFn backward;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  bool grad_enabled_;
};

}  // namespace protfit::nn
