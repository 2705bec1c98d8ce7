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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "protfit/nn/grad_check.hpp"
#include "protfit/nn/ops.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/rng.hpp"

namespace protfit::nn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tensor random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.values()) v = static_cast<Scalar>(scale * rng.normal());
  return t;
}

TEST(Tensor, SizeMatchesShape) {
  Tensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rows(), 6u);
  EXPECT_EQ(t.last_dim(), 4u);
  EXPECT_THROW(Tensor({2, 2}, std::vector<Scalar>{1, 2, 3}), ShapeError);
}

TEST(Linear, IdentityWeights) {
  Graph g(false);
  Tensor x = random_tensor({2, 3, 4}, 1);
  Tensor w({4, 4});
  for (std::size_t i = 0; i < 4; ++i) w[i * 4 + i] = 1;
  auto y = linear(g, g.constant(x), g.constant(w), g.constant(Tensor({4})));
  EXPECT_TRUE(g.value(y).identical(x));
}

TEST(Linear, AddsBias) {
  Graph g(false);
  auto y = linear(g, g.constant(Tensor({1, 1, 2}, {1, 2})),
                  g.constant(Tensor({2, 2}, {1, 0, 0, 1})), g.constant(Tensor({2}, {3, 3})));
  EXPECT_EQ(g.value(y)[0], 4);
  EXPECT_EQ(g.value(y)[1], 5);
}

TEST(Linear, ShapeMismatch) {
  Graph g(false);
  EXPECT_THROW(linear(g, g.constant(Tensor({1, 3})), g.constant(Tensor({2, 2})),
                      g.constant(Tensor({2}))),
               ShapeError);
}

TEST(Linear, GradCheck) {
  auto r = grad_check(
      [](Graph& g, const std::vector<Var>& in) {
        auto y = linear(g, in[0], in[1], in[2]);
        return weighted_sum(g, y, random_tensor(g.value(y).shape(), 99));
      },
      {random_tensor({2, 3, 4}, 1), random_tensor({4, 5}, 2), random_tensor({5}, 3)});
  EXPECT_LT(r.max_rel_error, 1e-6) << "input " << r.worst_input << " index " << r.worst_index;
}

TEST(SquaredRelu, ValuesAndDerivative) {
  Graph g;
  auto x = g.input(Tensor({3}, {-1, 0, 2}), true);
  auto y = squared_relu(g, x);
  EXPECT_EQ(g.value(y)[0], 0);
  EXPECT_EQ(g.value(y)[1], 0);
  EXPECT_EQ(g.value(y)[2], 4);
  g.backward(sum(g, y));
  EXPECT_EQ(g.grad(x)[0], 0);
  EXPECT_EQ(g.grad(x)[2], 4);
}

TEST(SquaredRelu, GradCheck) {
  auto r = grad_check(
      [](Graph& g, const std::vector<Var>& in) {
        auto y = squared_relu(g, in[0]);
        return weighted_sum(g, y, random_tensor(g.value(y).shape(), 5));
      },
      {random_tensor({3, 7}, 4)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Conv1d, UnitKernelIsIdentity) {
  Graph g(false);
  Tensor x = random_tensor({2, 5, 3}, 8);
  auto y = causal_depthwise_conv1d(g, g.constant(x), g.constant(Tensor({1, 3}, 1.0)));
  EXPECT_TRUE(g.value(y).identical(x));
}

TEST(Conv1d, LeftPaddedSum) {
  Graph g(false);
  auto y = causal_depthwise_conv1d(g, g.constant(Tensor({1, 3, 1}, {1, 2, 3})),
                                   g.constant(Tensor({3, 1}, 1.0)));
  EXPECT_EQ(g.value(y)[0], 1);
  EXPECT_EQ(g.value(y)[1], 3);
  EXPECT_EQ(g.value(y)[2], 6);
}

TEST(Conv1d, KernelOrientation) {
  // kernel[k-1] weights the current position.
  Graph g(false);
  auto y = causal_depthwise_conv1d(g, g.constant(Tensor({1, 3, 1}, {1, 2, 3})),
                                   g.constant(Tensor({2, 1}, {10, 1})));
  EXPECT_EQ(g.value(y)[0], 1);
  EXPECT_EQ(g.value(y)[1], 12);
  EXPECT_EQ(g.value(y)[2], 23);
}

TEST(Conv1d, Causal) {
  Tensor x = random_tensor({1, 6, 2}, 3);
  Tensor k = random_tensor({5, 2}, 4);
  Graph g1(false), g2(false);
  auto a = causal_depthwise_conv1d(g1, g1.constant(x), g1.constant(k));
  x[2 * 2] += 1.5;
  auto b = causal_depthwise_conv1d(g2, g2.constant(x), g2.constant(k));
  for (std::size_t i = 0; i < 2 * 2; ++i) EXPECT_EQ(g1.value(a)[i], g2.value(b)[i]);
  EXPECT_NE(g1.value(a)[4], g2.value(b)[4]);
}

TEST(Conv1d, ShapeMismatch) {
  Graph g(false);
  EXPECT_THROW(causal_depthwise_conv1d(g, g.constant(Tensor({1, 3, 2})),
                                       g.constant(Tensor({3, 1}))),
               ShapeError);
}

TEST(Conv1d, GradCheck) {
  auto r = grad_check(
      [](Graph& g, const std::vector<Var>& in) {
        auto y = causal_depthwise_conv1d(g, in[0], in[1]);
        return weighted_sum(g, y, random_tensor(g.value(y).shape(), 6));
      },
      {random_tensor({2, 6, 3}, 1), random_tensor({3, 3}, 2)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Softmax, SymmetricAndMasked) {
  Graph g(false);
  auto a = softmax_lastaxis(g, g.constant(Tensor({2}, {0, 0})));
  EXPECT_DOUBLE_EQ(g.value(a)[0], 0.5);
  EXPECT_DOUBLE_EQ(g.value(a)[1], 0.5);
  Tensor mask({2}, {0, -kInf});
  auto b = softmax_lastaxis(g, g.constant(Tensor({2}, {0, 0})), &mask);
  EXPECT_EQ(g.value(b)[0], 1);
  EXPECT_EQ(g.value(b)[1], 0);
}

TEST(Softmax, AllMaskedRowIsError) {
  Graph g(false);
  Tensor mask({2}, {-kInf, -kInf});
  EXPECT_THROW(softmax_lastaxis(g, g.constant(Tensor({2})), &mask), NumericError);
}

TEST(Softmax, RowsAreProbabilityVectors) {
  Graph g(false);
  Tensor mask = random_tensor({5, 9}, 12);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 9; ++j) mask[i * 9 + j] = -kInf;
  }
  auto p = softmax_lastaxis(g, g.constant(random_tensor({3, 5, 9}, 11, 30.0)), &mask);
  const Tensor& v = g.value(p);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 9; ++c) {
      EXPECT_GE(v[r * 9 + c], 0);
      s += v[r * 9 + c];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Softmax, GradCheck) {
  Tensor mask({4}, {0, 0.5, -kInf, -1});
  auto r = grad_check(
      [&](Graph& g, const std::vector<Var>& in) {
        auto y = softmax_lastaxis(g, in[0], &mask);
        return weighted_sum(g, y, random_tensor(g.value(y).shape(), 6));
      },
      {random_tensor({3, 4}, 1)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(LayerNorm, NormalisesAndGradChecks) {
  Graph g(false);
  auto y = layer_norm(g, g.constant(random_tensor({4, 8}, 2, 3.0)),
                      g.constant(Tensor({8}, 1.0)), g.constant(Tensor({8})));
  for (std::size_t r = 0; r < 4; ++r) {
    double mean = 0, var = 0;
    for (std::size_t c = 0; c < 8; ++c) mean += g.value(y)[r * 8 + c];
    mean /= 8;
    for (std::size_t c = 0; c < 8; ++c) var += std::pow(g.value(y)[r * 8 + c] - mean, 2);
    EXPECT_NEAR(mean, 0, 1e-12);
    EXPECT_NEAR(var / 8, 1, 1e-3);
  }
  auto r = grad_check(
      [](Graph& g, const std::vector<Var>& in) {
        auto z = layer_norm(g, in[0], in[1], in[2]);
        return weighted_sum(g, z, random_tensor(g.value(z).shape(), 6));
      },
      {random_tensor({3, 6}, 1), random_tensor({6}, 2), random_tensor({6}, 3)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(CrossEntropy, UniformLogitsGiveLogV) {
  Graph g(false);
  std::vector<int> targets = {0, 3, 4};
  auto l = cross_entropy(g, g.constant(Tensor({1, 3, 5})), targets, -1);
  EXPECT_NEAR(g.value(l)[0], std::log(5.0), 1e-14);
}

TEST(CrossEntropy, ConfidentCorrectApproachesZero) {
  Graph g(false);
  Tensor logits({1, 4});
  logits[2] = 200;
  std::vector<int> targets = {2};
  EXPECT_LT(g.value(cross_entropy(g, g.constant(logits), targets, -1))[0], 1e-12);
}

TEST(CrossEntropy, IgnoredTargets) {
  Graph g(false);
  Tensor logits = random_tensor({4, 3}, 5);
  std::vector<int> some = {1, 9, 9, 0};
  std::vector<int> all = {9, 9, 9, 9};
  auto l = cross_entropy(g, g.constant(logits), some, 9);
  auto ls = log_softmax(logits);
  EXPECT_NEAR(g.value(l)[0], -(ls[0 * 3 + 1] + ls[3 * 3 + 0]) / 2, 1e-14);
  EXPECT_THROW(cross_entropy(g, g.constant(logits), all, 9), ValidationError);
}

TEST(CrossEntropy, GradCheck) {
  std::vector<int> targets = {1, 2, 0, 7, 4, 2};
  auto r = grad_check(
      [&](Graph& g, const std::vector<Var>& in) { return cross_entropy(g, in[0], targets, 7); },
      {random_tensor({2, 3, 5}, 1)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Embedding, GathersAndGradChecks) {
  std::vector<int> ids = {2, 0, 2, 1};
  Graph g(false);
  Tensor table = random_tensor({3, 4}, 8);
  auto e = embedding(g, g.constant(table), ids, {2, 2});
  EXPECT_EQ(g.value(e).shape(), (Shape{2, 2, 4}));
  EXPECT_EQ(g.value(e)[4 * 1 + 3], table[3]);
  auto r = grad_check(
      [&](Graph& gg, const std::vector<Var>& in) {
        auto y = embedding(gg, in[0], ids, {2, 2});
        return weighted_sum(gg, y, random_tensor(gg.value(y).shape(), 6));
      },
      {table});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Attention, ScoresAndMixGradCheck) {
  const std::size_t heads = 2;
  Tensor mask({3, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) mask[i * 3 + j] = -kInf;
  }
  auto r = grad_check(
      [&](Graph& g, const std::vector<Var>& in) {
        auto s = attention_scores(g, in[0], in[1], heads, true);
        auto p = softmax_lastaxis(g, s, &mask);
        auto y = attention_mix(g, p, in[2], true);
        return weighted_sum(g, y, random_tensor(g.value(y).shape(), 6));
      },
      {random_tensor({2, 3, 4}, 1), random_tensor({2, 3, 4}, 2), random_tensor({2, 3, 4}, 3)});
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(SliceConcat, RoundTripAndGradCheck) {
  Graph g(false);
  Tensor x = random_tensor({2, 3, 6}, 1);
  auto parts = std::vector<Var>{slice_last(g, g.constant(x), 0, 2),
                                slice_last(g, g.constant(x), 2, 6)};
  EXPECT_TRUE(g.value(concat_last(g, parts)).identical(x));
  auto r = grad_check(
      [](Graph& gg, const std::vector<Var>& in) {
        auto y = concat_last(gg, {slice_last(gg, in[0], 4, 6), in[1], slice_last(gg, in[0], 0, 1)});
        return weighted_sum(gg, y, random_tensor(gg.value(y).shape(), 6));
      },
      {random_tensor({2, 6}, 1), random_tensor({2, 3}, 2)});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Graph, SharedNodeAccumulatesGradient) {
  Graph g;
  auto x = g.input(Tensor({2}, {1.5, -2}), true);
  auto y = add(g, x, x);
  g.backward(sum(g, add(g, y, x)));
  EXPECT_EQ(g.grad(x)[0], 3);
  EXPECT_EQ(g.grad(x)[1], 3);
}

TEST(Graph, ParameterGradientHasParameterShape) {
  Parameter w{"w", random_tensor({3, 2}, 1), {}};
  Parameter b{"b", random_tensor({2}, 2), {}};
  Graph g;
  auto y = linear(g, g.constant(random_tensor({4, 3}, 3)), g.parameter(w), g.parameter(b));
  g.backward(sum(g, y));
  EXPECT_EQ(w.grad.shape(), w.value.shape());
  EXPECT_EQ(b.grad.shape(), b.value.shape());
  EXPECT_DOUBLE_EQ(b.grad[0], 4);
}

TEST(Graph, FrozenParameterGetsNoGradient) {
  Parameter w{"w", random_tensor({3, 2}, 1), {}};
  const Parameter& frozen = w;
  Graph g;
  auto x = g.input(random_tensor({4, 3}, 3), true);
  auto y = linear(g, x, g.parameter(frozen), g.constant(Tensor({2})));
  g.backward(sum(g, y));
  EXPECT_TRUE(w.grad.empty());
  EXPECT_FALSE(g.grad(x).empty());
}

TEST(Determinism, RepeatedEvaluationIsBitIdentical) {
  auto run = [] {
    Graph g(false);
    auto s = attention_scores(g, g.constant(random_tensor({1, 4, 4}, 1)),
                              g.constant(random_tensor({1, 4, 4}, 2)), 2, false);
    return g.value(softmax_lastaxis(g, s));
  };
  EXPECT_TRUE(run().identical(run()));
}

}  // namespace
}  // namespace protfit::nn
