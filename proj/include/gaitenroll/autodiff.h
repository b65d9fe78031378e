// Copyright 2026 The gaitenroll Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gaitenroll/tensor.h"

// Tape-free reverse-mode autodiff. Each op allocates a node holding its value
// and a closure that pushes the node's gradient to its parents. The graph is
// owned by the Var handles that reference it.
namespace gaitenroll::ad {

struct Node {
  Tensor value;
  Tensor grad;  // empty until touched by backward
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Adds `g` into grad, allocating on first use.
  void accumulate(const Tensor& g);
  Tensor& grad_buffer();
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Tensor value);
// Differentiable leaf; gradients() reports d(output)/d(leaf).
Var parameter(Tensor value);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // element-wise
Var scale(const Var& a, double s);
// x[n,m] + b[1,m] broadcast over rows.
Var add_bias(const Var& x, const Var& b);
Var matmul(const Var& a, const Var& b, bool transpose_a = false, bool transpose_b = false);
Var relu(const Var& x);
// Row-wise softmax with per-row max subtraction.
Var softmax_rows(const Var& x);
// Row-wise layer normalization: (x - mean) / sqrt(var + eps) * gain + bias,
// gain and bias of shape [1,d].
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
Var reshape(const Var& x, Shape shape);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var slice_rows(const Var& x, std::size_t begin, std::size_t count);
Var slice_cols(const Var& x, std::size_t begin, std::size_t count);
Var sum(const Var& x);   // -> [1,1]
Var mean(const Var& x);  // -> [1,1]
// Mean binary cross-entropy over logits[n,1] against labels in {0,1}:
// loss_i = (1-y) z + (1 + (w-1) y) (max(-z,0) + log(1 + exp(-|z|))).
// With pos_weight w = 1 this is max(z,0) - z y + log(1 + exp(-|z|)).
Var bce_with_logits(const Var& logits, std::span<const double> labels, double pos_weight = 1.0);

// Gradients of a scalar output with respect to `params`, in order. Params the
// output does not depend on get a zero tensor of their shape.
// Throws std::invalid_argument for non-scalar output and NumericError if a
// gradient turns non-finite.
std::vector<Tensor> gradients(const Var& output, std::span<const Var> params);

}  // namespace gaitenroll::ad
