// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Condition-token feature modulation: a trunk of 8 affine layers over the
// latent channels, interleaved with 7 modulation units that map a scalar
// token (channel SNR in dB, or target rate) to a per-channel factor in
// (0,1). The same machinery backs both the SNR and the rate variant.

#pragma once

#include <string>
#include <vector>

#include "swjc/nn.hpp"

namespace swjc {

// relu -> relu -> sigmoid over the scalar token; output broadcasts over
// all spatial positions (channel-wise attention only).
template <typename S>
struct ModUnit {
  Linear<S> l1, l2, l3;
  int out_width = 0;

  ModUnit() = default;
  ModUnit(ParamStore<S>& ps, const std::string& name, int hidden, int out)
      : l1(ps, name + ".fc1", 1, hidden),
        l2(ps, name + ".fc2", hidden, hidden),
        l3(ps, name + ".fc3", hidden, out),
        out_width(out) {}

  void init(Rng& rng) {
    l1.init_truncated(rng);
    l2.init_truncated(rng);
    l3.init_truncated(rng);
  }

  // token: [1,1] -> [out] in (0,1)
  Var<S> apply(Graph<S>& g, Var<S> token) const {
    Var<S> x = g.relu(l1.apply(g, token));
    x = g.relu(l2.apply(g, x));
    x = g.sigmoid(l3.apply(g, x));
    return g.reshape(x, {out_width});
  }

  // Convenience non-graph evaluation.
  Tensor<S> eval(S token_value) const {
    Graph<S> g(false);
    Tensor<S> t({1, 1});
    t[0] = token_value;
    return apply(g, g.input(t))->val();
  }
};

template <typename S>
struct ModNet {
  std::vector<Linear<S>> trunk;  // 8 layers, widths [C, N..N, C] with N = C
  std::vector<ModUnit<S>> units;  // 7
  int width = 0;

  static constexpr int kTrunkLayers = 8;

  ModNet() = default;
  ModNet(ParamStore<S>& ps, const std::string& name, int width_, int hidden) : width(width_) {
    for (int i = 0; i < kTrunkLayers; ++i)
      trunk.emplace_back(ps, name + ".fc" + std::to_string(i), width_, width_);
    for (int i = 0; i < kTrunkLayers - 1; ++i)
      units.emplace_back(ps, name + ".unit" + std::to_string(i), hidden, width_);
  }

  // Trunk weights keep unit signal scale against the ~0.5 modulation
  // factors at initialization; the units themselves use the small init.
  void init(Rng& rng) {
    for (size_t i = 0; i < trunk.size(); ++i)
      trunk[i].init_scaled(rng, i + 1 < trunk.size() ? 2.0 : 1.0);
    for (auto& u : units) u.init(rng);
  }

  // latent: [l, C]; token: [1,1]. Shape-preserving.
  Var<S> apply(Graph<S>& g, Var<S> latent, Var<S> token) const {
    check_arg(latent->val().shape().back() == width, "modnet: latent width mismatch");
    Var<S> x = trunk[0].apply(g, latent);
    for (size_t j = 0; j < units.size(); ++j) {
      x = g.row_mul(x, units[j].apply(g, token));
      x = trunk[j + 1].apply(g, x);
    }
    return x;
  }
};

}  // namespace swjc
