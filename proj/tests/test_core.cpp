// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Engine-level checks: RNG determinism and finite-difference validation of
// every autodiff op at 64-bit precision.

#include <catch2/catch_amalgamated.hpp>

#include "swjc/codec.hpp"
#include "swjc/graph.hpp"
#include "swjc/nn.hpp"
#include "test_util.hpp"

using namespace swjc;
using test::max_fd_error;
using test::random_tensor;
using test::weighted_sum;
using DGraph = Graph<double>;

TEST_CASE("rng: seeded streams reproduce and forks decorrelate") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  REQUIRE(a.next_u64() != c.next_u64());
  Rng f1 = a.fork(1), f2 = a.fork(2);
  REQUIRE(f1.next_u64() != f2.next_u64());

  Rng n(7);
  double mean = 0.0, var = 0.0;
  const int kn = 20000;
  std::vector<double> xs(kn);
  for (auto& x : xs) x = n.normal();
  for (double x : xs) mean += x / kn;
  for (double x : xs) var += (x - mean) * (x - mean) / kn;
  REQUIRE(std::abs(mean) < 0.03);
  REQUIRE(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("tensor: shape bookkeeping and views") {
  Tensor<double> t({2, 3});
  REQUIRE(t.size() == 6);
  t.mat(2, 3)(1, 2) = 5.0;
  REQUIRE(t[5] == 5.0);
  REQUIRE_THROWS_AS(t.reshaped({4}), InvalidArgument);
  auto r = t.reshaped({3, 2});
  REQUIRE(r.dim(0) == 3);
}

namespace {

// One stop shop: builds the op under test twice (analytic + FD closure).
template <typename BuildFn>
void check_input_grad(Tensor<double>& x, const std::vector<int>& out_shape, BuildFn&& build,
                      double tol = 2e-7, double step = 1e-6) {
  Rng wrng(99);
  Tensor<double> w = random_tensor(out_shape, wrng);
  auto eval = [&] {
    DGraph g;
    auto vx = g.input(x, true);
    return weighted_sum(g, build(g, vx), w)->val()[0];
  };
  DGraph g;
  auto vx = g.input(x, true);
  auto loss = weighted_sum(g, build(g, vx), w);
  g.backward(loss);
  REQUIRE(vx->has_grad);
  REQUIRE(max_fd_error(eval, x, vx->grad, step) < tol);
}

}  // namespace

TEST_CASE("autodiff: pointwise ops match finite differences") {
  Rng rng(1);
  Tensor<double> x = random_tensor({3, 5}, rng);
  check_input_grad(x, {3, 5}, [](DGraph& g, DGraph::Var v) { return g.gelu(v); });
  check_input_grad(x, {3, 5}, [](DGraph& g, DGraph::Var v) { return g.sigmoid(v); });
  check_input_grad(x, {3, 5}, [](DGraph& g, DGraph::Var v) { return g.scale(v, 2.5); });
  // relu/clamp kinks: keep values away from the fold
  for (int64_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) < 1e-3) x[i] = 0.1;
  check_input_grad(x, {3, 5}, [](DGraph& g, DGraph::Var v) { return g.relu(v); });
  Tensor<double> y = random_tensor({3, 5}, rng, 0.3);
  for (int64_t i = 0; i < y.size(); ++i) y[i] += 0.5;  // interior of [0,1] mostly
  check_input_grad(y, {3, 5}, [](DGraph& g, DGraph::Var v) { return g.clamp01(v); });
}

TEST_CASE("autodiff: arithmetic and broadcasts match finite differences") {
  Rng rng(2);
  Tensor<double> x = random_tensor({4, 6}, rng);
  Tensor<double> other = random_tensor({4, 6}, rng);
  Tensor<double> vrow = random_tensor({6}, rng);

  check_input_grad(x, {4, 6}, [&](DGraph& g, DGraph::Var v) { return g.add(v, g.constant(other)); });
  check_input_grad(x, {4, 6}, [&](DGraph& g, DGraph::Var v) { return g.mul(v, g.constant(other)); });
  check_input_grad(x, {4, 6},
                   [&](DGraph& g, DGraph::Var v) { return g.row_mul(v, g.constant(vrow)); });
  check_input_grad(x, {4, 6},
                   [&](DGraph& g, DGraph::Var v) { return g.row_add(v, g.constant(vrow)); });

  // gradient w.r.t. the broadcast vector
  Rng wrng(99);
  Tensor<double> w = random_tensor({4, 6}, wrng);
  auto eval = [&] {
    DGraph g;
    return weighted_sum(g, g.row_mul(g.input(x), g.input(vrow, true)), w)->val()[0];
  };
  DGraph g;
  auto vv = g.input(vrow, true);
  g.backward(weighted_sum(g, g.row_mul(g.input(x), vv), w));
  REQUIRE(max_fd_error(eval, vrow, vv->grad) < 2e-7);
}

TEST_CASE("autodiff: linear matches finite differences for x, w and bias") {
  Rng rng(3);
  Tensor<double> x = random_tensor({5, 4}, rng);
  Tensor<double> wmat = random_tensor({4, 3}, rng);
  Tensor<double> bias = random_tensor({3}, rng);
  Tensor<double> probe = random_tensor({5, 3}, rng);

  auto build = [&](DGraph& g, DGraph::Var vx, DGraph::Var vw, DGraph::Var vb) {
    return weighted_sum(g, g.linear(vx, vw, vb), probe);
  };
  auto eval = [&] {
    DGraph g;
    return build(g, g.input(x, true), g.input(wmat, true), g.input(bias, true))->val()[0];
  };
  DGraph g;
  auto vx = g.input(x, true);
  auto vw = g.input(wmat, true);
  auto vb = g.input(bias, true);
  g.backward(build(g, vx, vw, vb));
  REQUIRE(max_fd_error(eval, x, vx->grad) < 2e-7);
  REQUIRE(max_fd_error(eval, wmat, vw->grad) < 2e-7);
  REQUIRE(max_fd_error(eval, bias, vb->grad) < 2e-7);
}

TEST_CASE("autodiff: layer norm matches finite differences") {
  Rng rng(4);
  Tensor<double> x = random_tensor({6, 8}, rng);
  Tensor<double> gamma = random_tensor({8}, rng, 0.5);
  Tensor<double> beta = random_tensor({8}, rng, 0.5);
  Tensor<double> probe = random_tensor({6, 8}, rng);

  auto make = [&](DGraph& g, DGraph::Var vx, DGraph::Var vg, DGraph::Var vb) {
    return weighted_sum(g, g.layer_norm(vx, vg, vb), probe);
  };
  auto eval = [&] {
    DGraph g;
    return make(g, g.input(x, true), g.input(gamma, true), g.input(beta, true))->val()[0];
  };
  DGraph g;
  auto vx = g.input(x, true);
  auto vg = g.input(gamma, true);
  auto vb = g.input(beta, true);
  g.backward(make(g, vx, vg, vb));
  REQUIRE(max_fd_error(eval, x, vx->grad, 1e-6) < 1e-6);
  REQUIRE(max_fd_error(eval, gamma, vg->grad) < 1e-6);
  REQUIRE(max_fd_error(eval, beta, vb->grad) < 1e-6);
}

TEST_CASE("autodiff: gather, reshape, reductions, mse") {
  Rng rng(5);
  Tensor<double> x = random_tensor({4, 4}, rng);
  auto idx = std::make_shared<IndexMap>();
  Rng perm_rng(6);
  for (int i = 0; i < 20; ++i)
    idx->push_back(i % 3 == 0 ? -1 : static_cast<int64_t>(perm_rng.uniform_index(16)));
  check_input_grad(x, {20}, [&](DGraph& g, DGraph::Var v) { return g.gather(v, {20}, idx); });
  check_input_grad(x, {16}, [&](DGraph& g, DGraph::Var v) { return g.reshape(v, {16}); });
  check_input_grad(x, {1}, [](DGraph& g, DGraph::Var v) { return g.reduce_sum(v); });
  check_input_grad(x, {1}, [](DGraph& g, DGraph::Var v) { return g.reduce_mean(v); });

  Tensor<double> target = random_tensor({4, 4}, rng);
  check_input_grad(x, {1},
                   [&](DGraph& g, DGraph::Var v) { return g.mse_against(v, target); });
}

TEST_CASE("autodiff: window attention matches finite differences") {
  Rng rng(7);
  const int t = 4, heads = 2, c = 8, nw = 3;
  Tensor<double> qkv = random_tensor({nw * t, 3 * c}, rng, 0.5);
  Tensor<double> bias = random_tensor({9, heads}, rng, 0.5);  // window 2 -> (2*2-1)^2 = 9
  Tensor<double> mask({nw, t, t});
  Rng mrng(8);
  for (int64_t i = 0; i < mask.size(); ++i) mask[i] = mrng.uniform() < 0.2 ? -100.0 : 0.0;
  auto rel_index = relative_position_index(2);
  Tensor<double> probe = random_tensor({nw * t, c}, rng);

  auto make = [&](DGraph& g, DGraph::Var vq, DGraph::Var vb) {
    return weighted_sum(g, g.window_attention(vq, heads, t, vb, rel_index, &mask), probe);
  };
  auto eval = [&] {
    DGraph g;
    return make(g, g.input(qkv, true), g.input(bias, true))->val()[0];
  };
  DGraph g;
  auto vq = g.input(qkv, true);
  auto vb = g.input(bias, true);
  g.backward(make(g, vq, vb));
  REQUIRE(max_fd_error(eval, qkv, vq->grad, 1e-6) < 1e-6);
  REQUIRE(max_fd_error(eval, bias, vb->grad, 1e-6) < 1e-6);
}

TEST_CASE("autodiff: attention rows sum to one") {
  Rng rng(9);
  const int t = 9, heads = 1, c = 4, nw = 2;
  Tensor<double> qkv = random_tensor({nw * t, 3 * c}, rng);
  DGraph g(false);
  Tensor<double> probs;
  g.window_attention(g.input(qkv), heads, t, nullptr, relative_position_index(3), nullptr, &probs);
  REQUIRE(probs.shape() == std::vector<int>({nw, heads, t, t}));
  for (int row = 0; row < nw * heads * t; ++row) {
    double s = 0.0;
    for (int j = 0; j < t; ++j) s += probs[static_cast<int64_t>(row) * t + j];
    REQUIRE(std::abs(s - 1.0) < 1e-6);
  }
}

TEST_CASE("autodiff: power normalize and complex channel ops") {
  Rng rng(10);
  Tensor<double> x = random_tensor({12}, rng);
  check_input_grad(x, {12}, [](DGraph& g, DGraph::Var v) { return g.power_normalize(v); });

  auto coeff = std::make_shared<Tensor<double>>(random_tensor({12}, rng));
  check_input_grad(x, {12},
                   [&](DGraph& g, DGraph::Var v) { return g.complex_scale(v, coeff); });

  // zero vector is rejected
  Tensor<double> z({4});
  DGraph g;
  REQUIRE_THROWS_AS(g.power_normalize(g.input(z)), InvalidArgument);
}

TEST_CASE("autodiff: shared parameters accumulate gradients") {
  Rng rng(11);
  ParamStore<double> ps;
  auto& w = ps.add("w", {4, 4});
  w.value = random_tensor({4, 4}, rng);
  Tensor<double> x = random_tensor({2, 4}, rng);
  Tensor<double> probe = random_tensor({2, 4}, rng);

  auto eval = [&] {
    DGraph g;
    auto vw = g.leaf(w);
    auto y = g.linear(g.linear(g.input(x), vw), vw);  // same weight twice
    return weighted_sum(g, y, probe)->val()[0];
  };
  ps.zero_grads();
  DGraph g;
  auto vw = g.leaf(w);
  auto y = g.linear(g.linear(g.input(x), vw), vw);
  g.backward(weighted_sum(g, y, probe));
  g.collect_param_grads();
  REQUIRE(max_fd_error(eval, w.value, w.grad) < 2e-7);
}

TEST_CASE("autodiff: grad-disabled graphs build no tape state") {
  Rng rng(12);
  Tensor<double> x = random_tensor({4, 4}, rng);
  DGraph g(false);
  auto vx = g.input(x, true);  // demoted: gradients are disabled
  auto out = g.gelu(vx);
  REQUIRE(!out->requires_grad);
}
