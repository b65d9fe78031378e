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

#include "gaitenroll/autodiff.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace gaitenroll::ad {

namespace {

std::shared_ptr<Node> make_node(Tensor value, std::vector<std::shared_ptr<Node>> parents,
                                const char* op) {
  value.check_finite(op);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const auto& p : parents) node->requires_grad = node->requires_grad || p->requires_grad;
  if (node->requires_grad) node->parents = std::move(parents);
  return node;
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                                " vs " + shape_string(b.shape()));
  }
}

void require_matrix(const Var& x, const char* op) {
  if (x.shape().size() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected rank-2 tensor, got " +
                                shape_string(x.shape()));
  }
}

}  // namespace

Tensor& Node::grad_buffer() {
  if (grad.size() == 0) grad = Tensor(value.shape());
  return grad;
}

void Node::accumulate(const Tensor& g) {
  Tensor& buf = grad_buffer();
  auto dst = buf.data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Var constant(Tensor value) { return Var(make_node(std::move(value), {}, "constant")); }

Var parameter(Tensor value) {
  auto node = make_node(std::move(value), {}, "parameter");
  node->requires_grad = true;
  node->value.set_requires_grad(true);
  return Var(node);
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
  auto node = make_node(std::move(out), {a.node(), b.node()}, "add");
  node->backward = [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) p->accumulate(self.grad);
    }
  };
  return Var(node);
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  auto node = make_node(std::move(out), {a.node(), b.node()}, "sub");
  node->backward = [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
    if (self.parents[1]->requires_grad) {
      auto dst = self.parents[1]->grad_buffer().data();
      auto g = self.grad.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= g[i];
    }
  };
  return Var(node);
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  auto node = make_node(std::move(out), {a.node(), b.node()}, "mul");
  node->backward = [](Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    auto g = self.grad.data();
    if (pa->requires_grad) {
      auto dst = pa->grad_buffer().data();
      auto other = pb->value.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i] * other[i];
    }
    if (pb->requires_grad) {
      auto dst = pb->grad_buffer().data();
      auto other = pa->value.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i] * other[i];
    }
  };
  return Var(node);
}

Var scale(const Var& a, double s) {
  Tensor out = a.value();
  for (double& v : out.data()) v *= s;
  auto node = make_node(std::move(out), {a.node()}, "scale");
  node->backward = [s](Node& self) {
    auto dst = self.parents[0]->grad_buffer().data();
    auto g = self.grad.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * g[i];
  };
  return Var(node);
}

Var add_bias(const Var& x, const Var& b) {
  require_matrix(x, "add_bias");
  require_matrix(b, "add_bias");
  const std::size_t n = x.value().rows();
  const std::size_t m = x.value().cols();
  if (b.value().rows() != 1 || b.value().cols() != m) {
    throw std::invalid_argument("add_bias: bias shape " + shape_string(b.shape()) +
                                " does not fit " + shape_string(x.shape()));
  }
  Tensor out = x.value();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) out(r, c) += b.value()[c];
  }
  auto node = make_node(std::move(out), {x.node(), b.node()}, "add_bias");
  node->backward = [n, m](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
    if (self.parents[1]->requires_grad) {
      auto dst = self.parents[1]->grad_buffer().data();
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) dst[c] += self.grad(r, c);
      }
    }
  };
  return Var(node);
}

Var matmul(const Var& a, const Var& b, bool transpose_a, bool transpose_b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  auto node = make_node(gaitenroll::matmul(a.value(), b.value(), transpose_a, transpose_b),
                        {a.node(), b.node()}, "matmul");
  node->backward = [transpose_a, transpose_b](Node& self) {
    const Tensor& A = self.parents[0]->value;
    const Tensor& B = self.parents[1]->value;
    const Tensor& G = self.grad;
    // C = op(A) op(B); dop(A) = G op(B)^T, dop(B) = op(A)^T G.
    if (self.parents[0]->requires_grad) {
      Tensor dA = transpose_a ? gaitenroll::matmul(B, G, transpose_b, true)
                              : gaitenroll::matmul(G, B, false, !transpose_b);
      self.parents[0]->accumulate(dA);
    }
    if (self.parents[1]->requires_grad) {
      Tensor dB = transpose_b ? gaitenroll::matmul(G, A, true, transpose_a)
                              : gaitenroll::matmul(A, G, !transpose_a, false);
      self.parents[1]->accumulate(dB);
    }
  };
  return Var(node);
}

Var relu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  auto node = make_node(std::move(out), {x.node()}, "relu");
  node->backward = [](Node& self) {
    auto dst = self.parents[0]->grad_buffer().data();
    auto in = self.parents[0]->value.data();
    auto g = self.grad.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (in[i] > 0.0) dst[i] += g[i];
    }
  };
  return Var(node);
}

Var softmax_rows(const Var& x) {
  require_matrix(x, "softmax_rows");
  const Tensor& in = x.value();
  const std::size_t n = in.rows();
  const std::size_t m = in.cols();
  Tensor out({n, m});
  for (std::size_t r = 0; r < n; ++r) {
    double mx = in(r, 0);
    for (std::size_t c = 1; c < m; ++c) mx = std::max(mx, in(r, c));
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      out(r, c) = std::exp(in(r, c) - mx);
      total += out(r, c);
    }
    for (std::size_t c = 0; c < m; ++c) out(r, c) /= total;
  }
  auto node = make_node(std::move(out), {x.node()}, "softmax_rows");
  node->backward = [n, m](Node& self) {
    Tensor& dst = self.parents[0]->grad_buffer();
    const Tensor& y = self.value;
    const Tensor& g = self.grad;
    for (std::size_t r = 0; r < n; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < m; ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < m; ++c) dst(r, c) += y(r, c) * (g(r, c) - dot);
    }
  };
  return Var(node);
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  require_matrix(x, "layer_norm");
  const std::size_t n = x.value().rows();
  const std::size_t d = x.value().cols();
  if (d < 2) throw std::invalid_argument("layer_norm: feature dimension must be >= 2");
  if (gain.value().size() != d || bias.value().size() != d) {
    throw std::invalid_argument("layer_norm: gain/bias size does not match feature dimension");
  }
  const Tensor& in = x.value();
  Tensor normalized({n, d});
  std::vector<double> inv_std(n);
  for (std::size_t r = 0; r < n; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += in(r, c);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (in(r, c) - mu) * (in(r, c) - mu);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) normalized(r, c) = (in(r, c) - mu) * inv_std[r];
  }
  Tensor out({n, d});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out(r, c) = normalized(r, c) * gain.value()[c] + bias.value()[c];
    }
  }
  auto node = make_node(std::move(out), {x.node(), gain.node(), bias.node()}, "layer_norm");
  node->backward = [n, d, normalized = std::move(normalized),
                    inv_std = std::move(inv_std)](Node& self) {
    const Tensor& g = self.grad;
    auto& px = self.parents[0];
    auto& pg = self.parents[1];
    auto& pb = self.parents[2];
    if (pg->requires_grad) {
      auto dst = pg->grad_buffer().data();
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) dst[c] += g(r, c) * normalized(r, c);
      }
    }
    if (pb->requires_grad) {
      auto dst = pb->grad_buffer().data();
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) dst[c] += g(r, c);
      }
    }
    if (px->requires_grad) {
      Tensor& dst = px->grad_buffer();
      const Tensor& gain_v = pg->value;
      std::vector<double> dxhat(d);
      for (std::size_t r = 0; r < n; ++r) {
        double mean_dxhat = 0.0;
        double mean_dxhat_xhat = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          dxhat[c] = g(r, c) * gain_v[c];
          mean_dxhat += dxhat[c];
          mean_dxhat_xhat += dxhat[c] * normalized(r, c);
        }
        mean_dxhat /= static_cast<double>(d);
        mean_dxhat_xhat /= static_cast<double>(d);
        for (std::size_t c = 0; c < d; ++c) {
          dst(r, c) += inv_std[r] * (dxhat[c] - mean_dxhat - normalized(r, c) * mean_dxhat_xhat);
        }
      }
    }
  };
  return Var(node);
}

Var reshape(const Var& x, Shape shape) {
  auto node = make_node(x.value().reshaped(std::move(shape)), {x.node()}, "reshape");
  node->backward = [](Node& self) {
    auto dst = self.parents[0]->grad_buffer().data();
    auto g = self.grad.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
  };
  return Var(node);
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const std::size_t m = parts[0].value().cols();
  std::size_t n = 0;
  for (const Var& p : parts) {
    require_matrix(p, "concat_rows");
    if (p.value().cols() != m) throw std::invalid_argument("concat_rows: column count mismatch");
    n += p.value().rows();
  }
  std::vector<double> data;
  data.reserve(n * m);
  std::vector<std::shared_ptr<Node>> parents;
  for (const Var& p : parts) {
    auto v = p.value().data();
    data.insert(data.end(), v.begin(), v.end());
    parents.push_back(p.node());
  }
  auto node = make_node(Tensor({n, m}, std::move(data)), std::move(parents), "concat_rows");
  node->backward = [](Node& self) {
    std::size_t offset = 0;
    auto g = self.grad.data();
    for (auto& p : self.parents) {
      const std::size_t len = p->value.size();
      if (p->requires_grad) {
        auto dst = p->grad_buffer().data();
        for (std::size_t i = 0; i < len; ++i) dst[i] += g[offset + i];
      }
      offset += len;
    }
  };
  return Var(node);
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t n = parts[0].value().rows();
  std::size_t m = 0;
  for (const Var& p : parts) {
    require_matrix(p, "concat_cols");
    if (p.value().rows() != n) throw std::invalid_argument("concat_cols: row count mismatch");
    m += p.value().cols();
  }
  Tensor out({n, m});
  std::vector<std::shared_ptr<Node>> parents;
  std::size_t col = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, col + c) = v(r, c);
    }
    col += v.cols();
    parents.push_back(p.node());
  }
  auto node = make_node(std::move(out), std::move(parents), "concat_cols");
  node->backward = [n](Node& self) {
    std::size_t col = 0;
    for (auto& p : self.parents) {
      const std::size_t w = p->value.cols();
      if (p->requires_grad) {
        Tensor& dst = p->grad_buffer();
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < w; ++c) dst(r, c) += self.grad(r, col + c);
        }
      }
      col += w;
    }
  };
  return Var(node);
}

Var slice_rows(const Var& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_rows");
  const std::size_t m = x.value().cols();
  if (count == 0 || begin + count > x.value().rows()) {
    throw std::out_of_range("slice_rows: range out of bounds");
  }
  auto src = x.value().data().subspan(begin * m, count * m);
  auto node = make_node(Tensor({count, m}, std::vector<double>(src.begin(), src.end())),
                        {x.node()}, "slice_rows");
  node->backward = [begin, m](Node& self) {
    auto dst = self.parents[0]->grad_buffer().data().subspan(begin * m);
    auto g = self.grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  };
  return Var(node);
}

Var slice_cols(const Var& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_cols");
  const std::size_t n = x.value().rows();
  if (count == 0 || begin + count > x.value().cols()) {
    throw std::out_of_range("slice_cols: range out of bounds");
  }
  Tensor out({n, count});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = x.value()(r, begin + c);
  }
  auto node = make_node(std::move(out), {x.node()}, "slice_cols");
  node->backward = [n, begin, count](Node& self) {
    Tensor& dst = self.parents[0]->grad_buffer();
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < count; ++c) dst(r, begin + c) += self.grad(r, c);
    }
  };
  return Var(node);
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  auto node = make_node(Tensor::scalar(total), {x.node()}, "sum");
  node->backward = [](Node& self) {
    const double g = self.grad[0];
    for (double& v : self.parents[0]->grad_buffer().data()) v += g;
  };
  return Var(node);
}

Var mean(const Var& x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().size())); }

Var bce_with_logits(const Var& logits, std::span<const double> labels, double pos_weight) {
  const Tensor& z = logits.value();
  if (z.size() != labels.size()) {
    throw std::invalid_argument("bce_with_logits: " + std::to_string(z.size()) + " logits vs " +
                                std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = z.size();
  std::vector<double> y(labels.begin(), labels.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = 1.0 + (pos_weight - 1.0) * y[i];
    const double softplus_neg = std::max(-z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i])));
    total += (1.0 - y[i]) * z[i] + weight * softplus_neg;
  }
  auto node = make_node(Tensor::scalar(total / static_cast<double>(n)), {logits.node()},
                        "bce_with_logits");
  node->backward = [n, pos_weight, y = std::move(y)](Node& self) {
    auto dst = self.parents[0]->grad_buffer().data();
    auto z = self.parents[0]->value.data();
    const double g = self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double weight = 1.0 + (pos_weight - 1.0) * y[i];
      // sigmoid(-z) computed without overflow
      const double e = std::exp(-std::abs(z[i]));
      const double sig_neg = z[i] >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
      dst[i] += g * ((1.0 - y[i]) - weight * sig_neg);
    }
  };
  return Var(node);
}

std::vector<Tensor> gradients(const Var& output, std::span<const Var> params) {
  if (output.value().size() != 1) {
    throw std::invalid_argument("gradients: output must be scalar, got shape " +
                                shape_string(output.shape()));
  }
  // Post-order DFS gives parents before children; walk it in reverse.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  if (output.requires_grad()) stack.emplace_back(output.node().get(), 0);
  if (!stack.empty()) visited.insert(output.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* node : order) node->grad = Tensor();
  if (!order.empty()) {
    output.node()->grad_buffer()[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* node = *it;
      if (node->backward && node->grad.size() != 0) {
        node->backward(*node);
      }
    }
  }
  std::vector<Tensor> result;
  result.reserve(params.size());
  for (const Var& p : params) {
    const Tensor& g = p.node()->grad;
    if (visited.contains(p.node().get()) && g.size() != 0) {
      g.check_finite("gradient");
      result.push_back(g);
    } else {
      result.emplace_back(p.shape());
    }
  }
  return result;
}

}  // namespace gaitenroll::ad
