// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "swjc/graph.hpp"
#include "swjc/rng.hpp"

namespace swjc {

// Owns every parameter of a model in registration order. Order is the
// canonical iteration order for the optimizer, checkpoints and seeding,
// so it must be construction-deterministic.
template <typename S>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  Parameter<S>& add(std::string name, std::vector<int> shape) {
    for (const auto* p : ordered_)
      check_arg(p->name != name, "parameter name registered twice: " + name);
    params_.emplace_back(std::move(name), std::move(shape));
    ordered_.push_back(&params_.back());
    return params_.back();
  }

  const std::vector<Parameter<S>*>& all() const { return ordered_; }

  Parameter<S>* find(const std::string& name) {
    for (auto* p : ordered_)
      if (p->name == name) return p;
    return nullptr;
  }

  int64_t total_size() const {
    int64_t n = 0;
    for (const auto* p : ordered_) n += p->value.size();
    return n;
  }

  void zero_grads() {
    for (auto* p : ordered_) p->grad.set_zero();
  }

 private:
  std::deque<Parameter<S>> params_;
  std::vector<Parameter<S>*> ordered_;
};

template <typename S>
struct Linear {
  Parameter<S>* w = nullptr;  // [in, out]
  Parameter<S>* b = nullptr;

  Linear() = default;
  Linear(ParamStore<S>& ps, const std::string& name, int in, int out, bool bias = true) {
    w = &ps.add(name + ".w", {in, out});
    if (bias) b = &ps.add(name + ".b", {out});
  }

  void init_truncated(Rng& rng, double stddev = 0.02) {
    w->value.fill_truncated_normal(rng, stddev);
    if (b) b->value.set_zero();
  }

  // Plain normal init with explicit gain; used where a unit-variance signal
  // path matters more than the small-init convention.
  void init_scaled(Rng& rng, double gain) {
    const double stddev = gain / std::sqrt(static_cast<double>(w->value.dim(0)));
    w->value.fill_normal(rng, stddev);
    if (b) b->value.set_zero();
  }

  Var<S> apply(Graph<S>& g, Var<S> x) const {
    return g.linear(x, g.leaf(*w), b ? g.leaf(*b) : nullptr);
  }
};

template <typename S>
struct LayerNorm {
  Parameter<S>* gamma = nullptr;
  Parameter<S>* beta = nullptr;

  LayerNorm() = default;
  LayerNorm(ParamStore<S>& ps, const std::string& name, int width) {
    gamma = &ps.add(name + ".gamma", {width});
    beta = &ps.add(name + ".beta", {width});
    gamma->value.fill(S(1));
  }

  Var<S> apply(Graph<S>& g, Var<S> x) const {
    return g.layer_norm(x, g.leaf(*gamma), g.leaf(*beta));
  }
};

// Adam with optional per-parameter freezing and global-norm clipping.
// Moments persist across phases; freezing a parameter leaves its moments
// and step count untouched by skipping the update only.
template <typename S>
class Adam {
 public:
  Adam(std::vector<Parameter<S>*> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto* p : params_) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

  // Scales trainable gradients so the global L2 norm is at most max_norm.
  // Returns the pre-clip norm.
  double clip_global_norm(double max_norm, const std::vector<uint8_t>& trainable) {
    double sq = 0.0;
    for (size_t i = 0; i < params_.size(); ++i) {
      if (!trainable[i]) continue;
      sq += static_cast<double>(params_[i]->grad.vec().squaredNorm());
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
      const S scale = static_cast<S>(max_norm / norm);
      for (size_t i = 0; i < params_.size(); ++i) {
        if (!trainable[i]) continue;
        params_[i]->grad.vec() *= scale;
      }
    }
    return norm;
  }

  void step(const std::vector<uint8_t>& trainable) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      if (!trainable[i]) continue;
      auto& p = *params_[i];
      auto m = m_[i].vec();
      auto v = v_[i].vec();
      auto gvec = p.grad.vec();
      m = static_cast<S>(beta1_) * m + static_cast<S>(1.0 - beta1_) * gvec;
      v = static_cast<S>(beta2_) * v + static_cast<S>(1.0 - beta2_) * gvec.cwiseProduct(gvec);
      const S step_size = static_cast<S>(lr_ / bc1);
      const S denom_scale = static_cast<S>(1.0 / std::sqrt(bc2));
      p.value.vec().array() -=
          step_size * m.array() / (v.array().sqrt() * denom_scale + static_cast<S>(eps_));
    }
  }

 private:
  std::vector<Parameter<S>*> params_;
  std::vector<Tensor<S>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

}  // namespace swjc
