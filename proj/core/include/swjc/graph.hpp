// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode autodiff over coarse tensor ops. Each forward pass builds a
// Graph; backward() walks the tape in reverse creation order. Ops are
// GEMM-sized, so tape overhead is negligible next to the math.

#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/tensor.hpp"

namespace swjc {

// A named, trainable tensor. Lives in a module, outside any graph.
template <typename S>
struct Parameter {
  std::string name;
  Tensor<S> value;
  Tensor<S> grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<int> shape) : name(std::move(n)), value(shape), grad(shape) {}

  void zero_grad() { grad.set_zero(); }
};

using IndexMap = std::vector<int64_t>;
using IndexMapPtr = std::shared_ptr<const IndexMap>;

template <typename S>
class Graph {
 public:
  struct Node {
    const Tensor<S>* ext = nullptr;  // leaves referencing external storage
    Tensor<S> owned;
    Tensor<S> grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::function<void(Graph&, Node&)> backward;
    Parameter<S>* param = nullptr;

    const Tensor<S>& val() const { return ext ? *ext : owned; }

    Tensor<S>& grad_buf() {
      if (!has_grad) {
        grad = Tensor<S>(val().shape());
        has_grad = true;
      }
      return grad;
    }
  };
  using Var = Node*;

  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  // ---- leaves -------------------------------------------------------------

  Var leaf(Parameter<S>& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return it->second;
    Node* n = new_node();
    n->ext = &p.value;
    n->param = &p;
    n->requires_grad = grad_enabled_;
    param_nodes_.emplace(&p, n);
    return n;
  }

  Var input(const Tensor<S>& t, bool requires_grad = false) {
    Node* n = new_node();
    n->ext = &t;
    n->requires_grad = requires_grad && grad_enabled_;
    return n;
  }

  Var constant(Tensor<S> t) {
    Node* n = new_node();
    n->owned = std::move(t);
    return n;
  }

  // ---- arithmetic ---------------------------------------------------------

  Var add(Var a, Var b) {
    check_arg(a->val().same_shape(b->val()), "add: shape mismatch");
    Node* n = make(a->val().shape(), {a, b});
    n->owned.vec() = a->val().vec() + b->val().vec();
    if (n->requires_grad) {
      n->backward = [a, b](Graph&, Node& self) {
        if (a->requires_grad) a->grad_buf().vec() += self.grad.vec();
        if (b->requires_grad) b->grad_buf().vec() += self.grad.vec();
      };
    }
    return n;
  }

  Var mul(Var a, Var b) {
    check_arg(a->val().same_shape(b->val()), "mul: shape mismatch");
    Node* n = make(a->val().shape(), {a, b});
    n->owned.vec() = a->val().vec().cwiseProduct(b->val().vec());
    if (n->requires_grad) {
      n->backward = [a, b](Graph&, Node& self) {
        if (a->requires_grad) a->grad_buf().vec() += self.grad.vec().cwiseProduct(b->val().vec());
        if (b->requires_grad) b->grad_buf().vec() += self.grad.vec().cwiseProduct(a->val().vec());
      };
    }
    return n;
  }

  Var scale(Var a, S c) {
    Node* n = make(a->val().shape(), {a});
    n->owned.vec() = c * a->val().vec();
    if (n->requires_grad) {
      n->backward = [a, c](Graph&, Node& self) {
        if (a->requires_grad) a->grad_buf().vec() += c * self.grad.vec();
      };
    }
    return n;
  }

  // x: [M,N], v: [N]; broadcast v over rows.
  Var row_mul(Var x, Var v) {
    const int ncols = v->val().dim(0);
    check_arg(x->val().size() % ncols == 0, "row_mul: width mismatch");
    const int nrows = static_cast<int>(x->val().size() / ncols);
    Node* n = make(x->val().shape(), {x, v});
    n->owned.mat(nrows, ncols) =
        x->val().mat(nrows, ncols).array().rowwise() * v->val().vec().transpose().array();
    if (n->requires_grad) {
      n->backward = [x, v, nrows, ncols](Graph&, Node& self) {
        auto g = self.grad.mat(nrows, ncols);
        if (x->requires_grad)
          x->grad_buf().mat(nrows, ncols).array() +=
              g.array().rowwise() * v->val().vec().transpose().array();
        if (v->requires_grad)
          v->grad_buf().vec() +=
              g.cwiseProduct(x->val().mat(nrows, ncols)).colwise().sum().transpose();
      };
    }
    return n;
  }

  Var row_add(Var x, Var v) {
    const int ncols = v->val().dim(0);
    check_arg(x->val().size() % ncols == 0, "row_add: width mismatch");
    const int nrows = static_cast<int>(x->val().size() / ncols);
    Node* n = make(x->val().shape(), {x, v});
    n->owned.mat(nrows, ncols) =
        x->val().mat(nrows, ncols).array().rowwise() + v->val().vec().transpose().array();
    if (n->requires_grad) {
      n->backward = [x, v, nrows, ncols](Graph&, Node& self) {
        if (x->requires_grad) x->grad_buf().vec() += self.grad.vec();
        if (v->requires_grad)
          v->grad_buf().vec() += self.grad.mat(nrows, ncols).colwise().sum().transpose();
      };
    }
    return n;
  }

  // ---- linear algebra -----------------------------------------------------

  // x: [M,K] (any leading shape collapsed to rows), w: [K,N], b: [N] or null.
  // Output rows match x's leading shape with the last dim replaced by N.
  Var linear(Var x, Var w, Var b = nullptr) {
    const int k = w->val().dim(0);
    const int ncols = w->val().dim(1);
    check_arg(x->val().shape().back() == k, "linear: inner dimension mismatch");
    const int nrows = static_cast<int>(x->val().size() / k);
    std::vector<int> out_shape = x->val().shape();
    out_shape.back() = ncols;
    std::vector<Var> parents = {x, w};
    if (b) parents.push_back(b);
    Node* n = make(out_shape, parents);
    auto y = n->owned.mat(nrows, ncols);
    y.noalias() = x->val().mat(nrows, k) * w->val().mat(k, ncols);
    if (b) {
      check_arg(b->val().size() == ncols, "linear: bias width mismatch");
      y.array().rowwise() += b->val().vec().transpose().array();
    }
    if (n->requires_grad) {
      n->backward = [x, w, b, nrows, k, ncols](Graph&, Node& self) {
        auto g = self.grad.mat(nrows, ncols);
        if (x->requires_grad)
          x->grad_buf().mat(nrows, k).noalias() += g * w->val().mat(k, ncols).transpose();
        if (w->requires_grad)
          w->grad_buf().mat(k, ncols).noalias() += x->val().mat(nrows, k).transpose() * g;
        if (b && b->requires_grad) b->grad_buf().vec() += g.colwise().sum().transpose();
      };
    }
    return n;
  }

  // Row-wise layer normalization over the trailing dimension.
  Var layer_norm(Var x, Var gamma, Var beta, S eps = S(1e-5)) {
    const int ncols = gamma->val().dim(0);
    check_arg(x->val().shape().back() == ncols, "layer_norm: width mismatch");
    const int nrows = static_cast<int>(x->val().size() / ncols);
    Node* n = make(x->val().shape(), {x, gamma, beta});
    auto xm = x->val().mat(nrows, ncols);
    auto xhat_store = std::make_shared<Tensor<S>>(x->val().shape());
    auto rstd_store = std::make_shared<std::vector<S>>(static_cast<size_t>(nrows));
    auto xhat = xhat_store->mat(nrows, ncols);
    for (int r = 0; r < nrows; ++r) {
      const S mu = xm.row(r).mean();
      const S var = (xm.row(r).array() - mu).square().mean();
      const S rstd = S(1) / std::sqrt(var + eps);
      (*rstd_store)[static_cast<size_t>(r)] = rstd;
      xhat.row(r) = (xm.row(r).array() - mu) * rstd;
    }
    n->owned.mat(nrows, ncols) =
        (xhat.array().rowwise() * gamma->val().vec().transpose().array()).rowwise() +
        beta->val().vec().transpose().array();
    if (n->requires_grad) {
      n->backward = [x, gamma, beta, xhat_store, rstd_store, nrows, ncols](Graph&, Node& self) {
        auto g = self.grad.mat(nrows, ncols);
        auto xhat = xhat_store->mat(nrows, ncols);
        if (gamma->requires_grad)
          gamma->grad_buf().vec() += g.cwiseProduct(xhat).colwise().sum().transpose();
        if (beta->requires_grad) beta->grad_buf().vec() += g.colwise().sum().transpose();
        if (x->requires_grad) {
          auto gx = x->grad_buf().mat(nrows, ncols);
          for (int r = 0; r < nrows; ++r) {
            const S rstd = (*rstd_store)[static_cast<size_t>(r)];
            // dxhat = g * gamma; dx = rstd*(dxhat - mean(dxhat) - xhat*mean(dxhat*xhat))
            Eigen::Array<S, 1, Eigen::Dynamic> dxhat =
                g.row(r).array() * gamma->val().vec().transpose().array();
            const S m1 = dxhat.mean();
            const S m2 = (dxhat * xhat.row(r).array()).mean();
            gx.row(r).array() += rstd * (dxhat - m1 - xhat.row(r).array() * m2);
          }
        }
      };
    }
    return n;
  }

  // ---- pointwise nonlinearities -------------------------------------------

  Var relu(Var x) {
    Node* n = make(x->val().shape(), {x});
    n->owned.vec() = x->val().vec().cwiseMax(S(0));
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto gx = x->grad_buf().vec();
        const auto& xv = x->val();
        for (int64_t i = 0; i < xv.size(); ++i)
          if (xv[i] > S(0)) gx[i] += self.grad[i];
      };
    }
    return n;
  }

  // Exact GELU: x * Phi(x).
  Var gelu(Var x) {
    Node* n = make(x->val().shape(), {x});
    const auto& xv = x->val();
    for (int64_t i = 0; i < xv.size(); ++i) {
      const double z = static_cast<double>(xv[i]);
      n->owned[i] = static_cast<S>(z * 0.5 * (1.0 + std::erf(z * M_SQRT1_2)));
    }
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto& gx = x->grad_buf();
        const auto& xv = x->val();
        constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
        for (int64_t i = 0; i < xv.size(); ++i) {
          const double z = static_cast<double>(xv[i]);
          const double phi_cdf = 0.5 * (1.0 + std::erf(z * M_SQRT1_2));
          const double pdf = inv_sqrt_2pi * std::exp(-0.5 * z * z);
          gx[i] += self.grad[i] * static_cast<S>(phi_cdf + z * pdf);
        }
      };
    }
    return n;
  }

  Var sigmoid(Var x) {
    Node* n = make(x->val().shape(), {x});
    const auto& xv = x->val();
    for (int64_t i = 0; i < xv.size(); ++i)
      n->owned[i] = static_cast<S>(1.0 / (1.0 + std::exp(-static_cast<double>(xv[i]))));
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto& gx = x->grad_buf();
        for (int64_t i = 0; i < self.owned.size(); ++i) {
          const S y = self.owned[i];
          gx[i] += self.grad[i] * y * (S(1) - y);
        }
      };
    }
    return n;
  }

  // Clamp to [0,1]; gradient passes through the interior only.
  Var clamp01(Var x) {
    Node* n = make(x->val().shape(), {x});
    n->owned.vec() = x->val().vec().cwiseMax(S(0)).cwiseMin(S(1));
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto& gx = x->grad_buf();
        const auto& xv = x->val();
        for (int64_t i = 0; i < xv.size(); ++i)
          if (xv[i] >= S(0) && xv[i] <= S(1)) gx[i] += self.grad[i];
      };
    }
    return n;
  }

  // ---- data movement ------------------------------------------------------

  // out[i] = idx[i] < 0 ? 0 : x[idx[i]]. Covers window partition/reverse,
  // cyclic shifts, patch rearrangements, im2col and channel scatter/compact.
  Var gather(Var x, std::vector<int> out_shape, IndexMapPtr idx) {
    Node* n = make(std::move(out_shape), {x});
    check_arg(static_cast<int64_t>(idx->size()) == n->owned.size(), "gather: index size mismatch");
    const auto& xv = x->val();
    for (int64_t i = 0; i < n->owned.size(); ++i) {
      const int64_t j = (*idx)[static_cast<size_t>(i)];
      n->owned[i] = j >= 0 ? xv[j] : S(0);
    }
    if (n->requires_grad) {
      n->backward = [x, idx](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto& gx = x->grad_buf();
        for (int64_t i = 0; i < self.owned.size(); ++i) {
          const int64_t j = (*idx)[static_cast<size_t>(i)];
          if (j >= 0) gx[j] += self.grad[i];
        }
      };
    }
    return n;
  }

  Var reshape(Var x, std::vector<int> shape) {
    Node* n = make(std::move(shape), {x});
    check_arg(n->owned.size() == x->val().size(), "reshape: element count mismatch");
    n->owned.vec() = x->val().vec();
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (x->requires_grad) x->grad_buf().vec() += self.grad.vec();
      };
    }
    return n;
  }

  // ---- attention ----------------------------------------------------------

  // Multi-head self-attention over equal-sized windows.
  //   qkv:       [nW*T, 3C], rows grouped by window
  //   rel_bias:  [(2M-1)^2, heads] table or null
  //   rel_index: T*T indices into the table rows
  //   attn_mask: [nW, T, T] additive logit mask or null
  // Returns [nW*T, C]. If probs_out is set, softmax rows are copied there
  // as [nW, heads, T, T].
  Var window_attention(Var qkv, int heads, int t, Var rel_bias, IndexMapPtr rel_index,
                       const Tensor<S>* attn_mask, Tensor<S>* probs_out = nullptr) {
    const int three_c = qkv->val().shape().back();
    check_arg(three_c % 3 == 0, "attention: qkv width not divisible by 3");
    const int c = three_c / 3;
    check_arg(c % heads == 0, "attention: width not divisible by heads");
    const int d = c / heads;
    const int64_t rows = qkv->val().size() / three_c;
    check_arg(rows % t == 0, "attention: rows not divisible by window size");
    const int nw = static_cast<int>(rows / t);
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(d)));

    std::vector<int> out_shape = qkv->val().shape();
    out_shape.back() = c;
    std::vector<Var> parents = {qkv};
    if (rel_bias) parents.push_back(rel_bias);
    Node* n = make(std::move(out_shape), parents);

    const bool keep_probs = n->requires_grad || probs_out != nullptr;
    auto probs = std::make_shared<Tensor<S>>();
    if (keep_probs) *probs = Tensor<S>({nw, heads, t, t});

    using M = typename Tensor<S>::Mat;
    auto qkv_m = qkv->val().mat(static_cast<int>(rows), three_c);
    auto out_m = n->owned.mat(static_cast<int>(rows), c);
    M logits(t, t);
    for (int w = 0; w < nw; ++w) {
      for (int h = 0; h < heads; ++h) {
        auto q = qkv_m.block(w * t, h * d, t, d);
        auto k = qkv_m.block(w * t, c + h * d, t, d);
        auto v = qkv_m.block(w * t, 2 * c + h * d, t, d);
        logits.noalias() = q * k.transpose();
        logits *= scale;
        if (rel_bias) {
          const auto& table = rel_bias->val();
          for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j)
              logits(i, j) += table[(*rel_index)[static_cast<size_t>(i * t + j)] * heads + h];
        }
        if (attn_mask) {
          const S* m = attn_mask->data() + static_cast<int64_t>(w) * t * t;
          for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) logits(i, j) += m[i * t + j];
        }
        // row-wise softmax
        for (int i = 0; i < t; ++i) {
          const S mx = logits.row(i).maxCoeff();
          logits.row(i) = (logits.row(i).array() - mx).exp();
          logits.row(i) /= logits.row(i).sum();
        }
        if (keep_probs) {
          S* p = probs->data() + (static_cast<int64_t>(w) * heads + h) * t * t;
          Eigen::Map<M>(p, t, t) = logits;
        }
        out_m.block(w * t, h * d, t, d).noalias() = logits * v;
      }
    }
    if (probs_out) *probs_out = *probs;

    if (n->requires_grad) {
      n->backward = [qkv, rel_bias, rel_index, probs, heads, t, nw, c, d, scale](Graph&,
                                                                                 Node& self) {
        const int three_c = 3 * c;
        const int64_t rows = static_cast<int64_t>(nw) * t;
        auto qkv_m = qkv->val().mat(static_cast<int>(rows), three_c);
        auto g_out = self.grad.mat(static_cast<int>(rows), c);
        typename Tensor<S>::Mat dlogits(t, t), dp(t, t);
        for (int w = 0; w < nw; ++w) {
          for (int h = 0; h < heads; ++h) {
            auto q = qkv_m.block(w * t, h * d, t, d);
            auto k = qkv_m.block(w * t, c + h * d, t, d);
            auto v = qkv_m.block(w * t, 2 * c + h * d, t, d);
            Eigen::Map<const typename Tensor<S>::Mat> p(
                probs->data() + (static_cast<int64_t>(w) * heads + h) * t * t, t, t);
            auto go = g_out.block(w * t, h * d, t, d);
            dp.noalias() = go * v.transpose();
            // softmax backward per row
            for (int i = 0; i < t; ++i) {
              const S dot = dp.row(i).cwiseProduct(p.row(i)).sum();
              dlogits.row(i) = p.row(i).array() * (dp.row(i).array() - dot);
            }
            if (qkv->requires_grad) {
              auto gq = qkv->grad_buf().mat(static_cast<int>(rows), three_c);
              gq.block(w * t, 2 * c + h * d, t, d).noalias() += p.transpose() * go;
              gq.block(w * t, h * d, t, d).noalias() += scale * (dlogits * k);
              gq.block(w * t, c + h * d, t, d).noalias() += scale * (dlogits.transpose() * q);
            }
            if (rel_bias && rel_bias->requires_grad) {
              auto& gt = rel_bias->grad_buf();
              for (int i = 0; i < t; ++i)
                for (int j = 0; j < t; ++j)
                  gt[(*rel_index)[static_cast<size_t>(i * t + j)] * heads + h] += dlogits(i, j);
            }
          }
        }
      };
    }
    return n;
  }

  // ---- reductions & losses ------------------------------------------------

  Var reduce_sum(Var x) {
    Node* n = make({1}, {x});
    n->owned[0] = x->val().vec().sum();
    if (n->requires_grad) {
      n->backward = [x](Graph&, Node& self) {
        if (x->requires_grad) x->grad_buf().vec().array() += self.grad[0];
      };
    }
    return n;
  }

  Var reduce_mean(Var x) {
    const S inv_n = S(1) / static_cast<S>(x->val().size());
    Node* n = make({1}, {x});
    n->owned[0] = x->val().vec().sum() * inv_n;
    if (n->requires_grad) {
      n->backward = [x, inv_n](Graph&, Node& self) {
        if (x->requires_grad) x->grad_buf().vec().array() += self.grad[0] * inv_n;
      };
    }
    return n;
  }

  // Mean squared error against a constant target.
  Var mse_against(Var x, const Tensor<S>& target) {
    check_arg(x->val().same_shape(target), "mse: shape mismatch");
    Node* n = make({1}, {x});
    const int64_t count = x->val().size();
    auto diff = std::make_shared<Tensor<S>>(x->val().shape());
    diff->vec() = x->val().vec() - target.vec();
    n->owned[0] = diff->vec().squaredNorm() / static_cast<S>(count);
    if (n->requires_grad) {
      n->backward = [x, diff, count](Graph&, Node& self) {
        if (x->requires_grad)
          x->grad_buf().vec() += (S(2) / static_cast<S>(count)) * self.grad[0] * diff->vec();
      };
    }
    return n;
  }

  // ---- channel-front ops ----------------------------------------------------

  // Pairs 2k reals into k complex symbols and scales to unit mean symbol
  // power: y = x * sqrt(k) / ||x||.
  Var power_normalize(Var x) {
    const int64_t size = x->val().size();
    check_arg(size % 2 == 0, "power_normalize: needs an even number of reals");
    const S k = static_cast<S>(size / 2);
    const S r = x->val().vec().norm();
    check_arg(r > S(0), "power_normalize: zero input vector");
    const S c = std::sqrt(k) / r;
    Node* n = make(x->val().shape(), {x});
    n->owned.vec() = c * x->val().vec();
    if (n->requires_grad) {
      n->backward = [x, c, r](Graph&, Node& self) {
        if (!x->requires_grad) return;
        // dL/dx = c*g - (c/r^2) (x.g) x
        const S xg = x->val().vec().dot(self.grad.vec());
        x->grad_buf().vec() += c * self.grad.vec() - (c * xg / (r * r)) * x->val().vec();
      };
    }
    return n;
  }

  // Per-pair complex product with a constant coefficient vector (fading or
  // equalizer taps). Gradient multiplies by the conjugate coefficients.
  Var complex_scale(Var x, std::shared_ptr<const Tensor<S>> coeff) {
    check_arg(x->val().same_shape(*coeff), "complex_scale: shape mismatch");
    check_arg(x->val().size() % 2 == 0, "complex_scale: odd length");
    Node* n = make(x->val().shape(), {x});
    const auto& xv = x->val();
    for (int64_t i = 0; i < xv.size(); i += 2) {
      const S a = xv[i], b = xv[i + 1];
      const S cre = (*coeff)[i], cim = (*coeff)[i + 1];
      n->owned[i] = a * cre - b * cim;
      n->owned[i + 1] = a * cim + b * cre;
    }
    if (n->requires_grad) {
      n->backward = [x, coeff](Graph&, Node& self) {
        if (!x->requires_grad) return;
        auto& gx = x->grad_buf();
        for (int64_t i = 0; i < self.grad.size(); i += 2) {
          const S gre = self.grad[i], gim = self.grad[i + 1];
          const S cre = (*coeff)[i], cim = (*coeff)[i + 1];
          gx[i] += gre * cre + gim * cim;
          gx[i + 1] += -gre * cim + gim * cre;
        }
      };
    }
    return n;
  }

  // Node with externally computed value and a caller-provided backward.
  Var custom(Tensor<S> value, std::vector<Var> parents,
             std::function<void(Graph&, Node&)> backward) {
    Node* n = make_owned(std::move(value), parents);
    if (n->requires_grad) n->backward = std::move(backward);
    return n;
  }

  // ---- engine ---------------------------------------------------------------

  void backward(Var loss) {
    check_arg(loss->val().size() == 1, "backward: loss must be scalar");
    loss->grad_buf()[0] = S(1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      Node& n = *it;
      if (n.has_grad && n.backward) n.backward(*this, n);
    }
  }

  // Accumulate parameter gradients gathered during backward: p.grad += scale * g.
  void collect_param_grads(S scale = S(1)) {
    for (auto& [p, node] : param_nodes_) {
      if (node->has_grad) p->grad.add_scaled(node->grad, scale);
    }
  }

  size_t node_count() const { return nodes_.size(); }

 private:
  Node* new_node() {
    nodes_.emplace_back();
    return &nodes_.back();
  }

  Node* make(std::vector<int> shape, const std::vector<Var>& parents) {
    Node* n = new_node();
    n->owned = Tensor<S>(std::move(shape));
    for (Var p : parents)
      if (p && p->requires_grad) n->requires_grad = true;
    n->requires_grad = n->requires_grad && grad_enabled_;
    return n;
  }

  Node* make_owned(Tensor<S> value, const std::vector<Var>& parents) {
    Node* n = new_node();
    n->owned = std::move(value);
    for (Var p : parents)
      if (p && p->requires_grad) n->requires_grad = true;
    n->requires_grad = n->requires_grad && grad_enabled_;
    return n;
  }

  bool grad_enabled_;
  std::deque<Node> nodes_;
  std::unordered_map<Parameter<S>*, Node*> param_nodes_;
};

template <typename S>
using Var = typename Graph<S>::Var;

}  // namespace swjc
