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

#include "protfit/nn/graph.hpp"

#include "protfit/util/error.hpp"

namespace protfit::nn {

Parameter& ParameterSet::add(std::string name, Tensor value) {
  if (index_.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  Tensor grad(value.shape());
  params_.push_back({std::move(name), std::move(value), std::move(grad)});
  return params_.back();
}

Parameter& ParameterSet::get(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw ConfigError("unknown parameter '" + std::string(name) + "'");
  }
  return params_[it->second];
}

const Parameter& ParameterSet::get(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->get(name);
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) {
    if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
    p.grad.fill(0);
  }
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

Var Graph::constant(Tensor value) { return input(std::move(value), false); }

Var Graph::input(Tensor value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = grad_enabled_ && requires_grad;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Graph::parameter(Parameter& p) {
  Node n;
  n.external = &p.value;
  n.param = &p;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Graph::parameter(const Parameter& p) {
  Node n;
  n.external = &p.value;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (grad_enabled_) {
    for (Var v : inputs) {
      if (nodes_[v.id].requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

const Tensor& Graph::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.external ? *n.external : n.value;
}

Tensor& Graph::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.empty() && !value(v).empty()) n.grad = Tensor(value(v).shape());
  return n.grad;
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " +
                     shape_string(value(loss).shape()));
  }
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss)[0] += Scalar(1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, n.grad);
    if (n.param) {
      Tensor& target = n.param->grad;
      if (target.shape() != n.param->value.shape()) {
        target = Tensor(n.param->value.shape());
      }
      for (std::size_t k = 0; k < target.size(); ++k) target[k] += n.grad[k];
    }
  }
}

}  // namespace protfit::nn
