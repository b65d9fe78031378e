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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "gaitenroll/adam.h"
#include "gaitenroll/autodiff.h"
#include "gaitenroll/rng.h"
#include "oracles.h"

using namespace gaitenroll;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
  return t;
}

using Builder = std::function<ad::Var(const std::vector<ad::Var>&)>;

double check_gradients(const Builder& build, const std::vector<Tensor>& inputs) {
  std::vector<ad::Var> leaves;
  for (const Tensor& t : inputs) leaves.push_back(ad::parameter(t));
  const auto analytic = ad::gradients(build(leaves), leaves);
  const auto numeric = oracle::finite_difference(
      [&](const std::vector<Tensor>& p) {
        std::vector<ad::Var> c;
        for (const Tensor& t : p) c.push_back(ad::constant(t));
        return build(c).value().item();
      },
      inputs);
  return oracle::max_relative_error(analytic, numeric);
}

}  // namespace

TEST_CASE("simple gradients") {
  const ad::Var x = ad::parameter(Tensor::scalar(3.0));
  CHECK(ad::gradients(ad::mul(x, x), std::vector<ad::Var>{x})[0].item() == 6.0);

  const ad::Var v = ad::parameter(Tensor::matrix(1, 3, {0.2, -1.0, 4.0}));
  const auto g = ad::gradients(ad::sum(ad::softmax_rows(v)), std::vector<ad::Var>{v})[0];
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(g[i]) < 1e-15);

  const ad::Var unused = ad::parameter(Tensor({2, 2}, 1.0));
  const auto both = ad::gradients(ad::mul(x, x), std::vector<ad::Var>{x, unused});
  CHECK(both[1] == Tensor({2, 2}, 0.0));
  CHECK_THROWS_AS(ad::gradients(v, std::vector<ad::Var>{v}), std::invalid_argument);
}

TEST_CASE("every op matches finite differences") {
  Rng rng(31);
  const Tensor a = random_tensor(rng, {3, 4}), b = random_tensor(rng, {3, 4});
  const Tensor m = random_tensor(rng, {4, 5}), row = random_tensor(rng, {1, 4});
  const Tensor gain = random_tensor(rng, {1, 4}), bias = random_tensor(rng, {1, 4});
  const Tensor ratio = Tensor::matrix(3, 1, {0.3, -1.2, 2.0});
  const std::vector<double> labels{1, 0, 1};

  auto weighted = [](const ad::Var& y, const std::vector<ad::Var>& p) {
    // sum(y * y) keeps every output element in play.
    (void)p;
    return ad::sum(ad::mul(y, y));
  };
  const std::vector<std::pair<const char*, std::pair<Builder, std::vector<Tensor>>>> cases{
      {"add", {[&](auto& p) { return weighted(ad::add(p[0], p[1]), p); }, {a, b}}},
      {"sub", {[&](auto& p) { return weighted(ad::sub(p[0], p[1]), p); }, {a, b}}},
      {"mul", {[&](auto& p) { return weighted(ad::mul(p[0], p[1]), p); }, {a, b}}},
      {"scale", {[&](auto& p) { return weighted(ad::scale(p[0], -1.7), p); }, {a}}},
      {"add_bias", {[&](auto& p) { return weighted(ad::add_bias(p[0], p[1]), p); }, {a, row}}},
      {"matmul", {[&](auto& p) { return weighted(ad::matmul(p[0], p[1]), p); }, {a, m}}},
      {"matmul_tb", {[&](auto& p) { return weighted(ad::matmul(p[0], p[1], false, true), p); }, {a, b}}},
      {"matmul_ta", {[&](auto& p) { return weighted(ad::matmul(p[0], p[1], true, false), p); }, {a, b}}},
      {"relu", {[&](auto& p) { return weighted(ad::relu(p[0]), p); }, {a}}},
      {"softmax", {[&](auto& p) { return weighted(ad::softmax_rows(p[0]), p); }, {a}}},
      {"layer_norm", {[&](auto& p) { return weighted(ad::layer_norm(p[0], p[1], p[2]), p); }, {a, gain, bias}}},
      {"reshape", {[&](auto& p) { return weighted(ad::matmul(ad::reshape(p[0], {4, 3}), p[1]), p); }, {a, random_tensor(rng, {3, 2})}}},
      {"concat", {[&](auto& p) {
         std::vector<ad::Var> r{p[0], p[1]}, c{p[0], p[1]};
         return ad::add(weighted(ad::concat_rows(r), p), ad::sum(ad::concat_cols(c)));
       }, {a, b}}},
      {"slice", {[&](auto& p) {
         return weighted(ad::add(ad::slice_rows(p[0], 1, 2), ad::slice_cols(ad::slice_rows(p[1], 0, 2), 0, 4)), p);
       }, {a, b}}},
      {"mean", {[&](auto& p) { return ad::mean(ad::mul(p[0], p[0])); }, {a}}},
      {"bce", {[&](auto& p) { return ad::bce_with_logits(p[0], labels, 2.5); }, {ratio}}},
  };
  for (const auto& [name, c] : cases) {
    CAPTURE(name);
    CHECK(check_gradients(c.first, c.second) <= 1e-6);
  }
}

TEST_CASE("random three-layer network matches finite differences") {
  Rng rng(77);
  const std::vector<Tensor> inputs{random_tensor(rng, {5, 6}), random_tensor(rng, {6, 7}, 0.5),
                                   random_tensor(rng, {1, 7}), random_tensor(rng, {7, 4}, 0.5),
                                   random_tensor(rng, {4, 1}, 0.5)};
  const std::vector<double> labels{1, 0, 0, 1, 1};
  const Builder net = [&](const std::vector<ad::Var>& p) {
    const ad::Var h1 = ad::relu(ad::add_bias(ad::matmul(p[0], p[1]), p[2]));
    const ad::Var h2 = ad::softmax_rows(ad::matmul(h1, p[3]));
    return ad::bce_with_logits(ad::matmul(h2, p[4]), labels);
  };
  CHECK(check_gradients(net, inputs) <= 1e-6);
}

TEST_CASE("softmax and layer norm numerics") {
  const ad::Var big = ad::constant(Tensor::matrix(2, 2, {1000, 0, 5, 5}));
  const Tensor s = ad::softmax_rows(big).value();
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(1, 0) == 0.5);

  Rng rng(2);
  const Tensor x = random_tensor(rng, {4, 6}, 3.0);
  Tensor shifted = x;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += 11.0;
  const Tensor sx = ad::softmax_rows(ad::constant(x)).value();
  const Tensor ss = ad::softmax_rows(ad::constant(shifted)).value();
  for (std::size_t r = 0; r < 4; ++r) {
    double total = 0;
    for (std::size_t c = 0; c < 6; ++c) {
      total += sx(r, c);
      CHECK(std::abs(sx(r, c) - ss(r, c)) < 1e-15);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }

  // With eps inside the root the normalized variance is var / (var + eps);
  // for well-scaled rows that is 1 to within 1e-9.
  const ad::Var ones = ad::constant(Tensor({1, 6}, 1.0));
  const ad::Var zeros = ad::constant(Tensor({1, 6}, 0.0));
  const Tensor scaled = random_tensor(rng, {4, 6}, 1000.0);
  for (const Tensor* input : {&x, &scaled}) {
    const Tensor y = ad::layer_norm(ad::constant(*input), ones, zeros).value();
    for (std::size_t r = 0; r < 4; ++r) {
      double mu = 0, var_in = 0, mean_out = 0, var_out = 0;
      for (std::size_t c = 0; c < 6; ++c) mu += (*input)(r, c) / 6;
      for (std::size_t c = 0; c < 6; ++c) var_in += ((*input)(r, c) - mu) * ((*input)(r, c) - mu) / 6;
      for (std::size_t c = 0; c < 6; ++c) mean_out += y(r, c) / 6;
      for (std::size_t c = 0; c < 6; ++c) var_out += (y(r, c) - mean_out) * (y(r, c) - mean_out) / 6;
      CHECK(std::abs(mean_out) < 1e-12);
      CHECK(std::abs(var_out - var_in / (var_in + 1e-5)) < 1e-12);
      if (input == &scaled) CHECK(std::abs(var_out - 1.0) <= 1e-9);
    }
  }
  const Tensor flat = ad::layer_norm(ad::constant(Tensor({1, 6}, 4.0)), ones, zeros).value();
  CHECK(flat == Tensor({1, 6}, 0.0));
}

TEST_CASE("NaN values raise NumericError") {
  CHECK_THROWS_AS(ad::parameter(Tensor::scalar(NAN)), NumericError);
  const ad::Var big = ad::parameter(Tensor::scalar(1e300));
  CHECK_THROWS_AS(ad::mul(big, big), NumericError);
}

TEST_CASE("adam first step and determinism") {
  std::vector<Tensor> p{Tensor::scalar(1.0)};
  AdamState adam(AdamOptions{0.001, 0.9, 0.999, 1e-8}, p);
  adam.step(p, std::vector<Tensor>{Tensor::scalar(1.0)});
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  CHECK(std::abs(p[0].item() - (1.0 - 0.001 / (1.0 + 1e-8))) < 1e-15);
  CHECK(adam.steps() == 1);

  std::vector<Tensor> q{Tensor::matrix(1, 2, {0.5, -0.5})};
  AdamState still(AdamOptions{}, q);
  still.step(q, std::vector<Tensor>{Tensor({1, 2}, 0.0)});
  CHECK(q[0] == Tensor::matrix(1, 2, {0.5, -0.5}));
  CHECK_THROWS(still.step(q, std::vector<Tensor>{Tensor({2, 2}, 0.0)}));

  auto run = [] {
    std::vector<Tensor> w{Tensor::matrix(1, 3, {1, 2, 3})};
    AdamState s(AdamOptions{}, w);
    for (int i = 0; i < 10; ++i) s.step(w, std::vector<Tensor>{Tensor::matrix(1, 3, {0.1 * i, -1, 2})});
    return w[0];
  };
  CHECK(run() == run());
}
