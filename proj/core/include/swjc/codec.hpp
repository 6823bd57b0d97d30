// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hierarchical windowed-attention encoder/decoder and the convolutional
// baseline backbone. Token grids are [h*w, C] row-major, rows in
// left-to-right top-to-bottom order.

#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "swjc/nn.hpp"

namespace swjc {

enum class Backbone { Attention, Convolutional };

struct CodecConfig {
  Backbone backbone = Backbone::Attention;
  std::vector<int> depths;  // blocks per stage, even (blocks come in W/SW pairs)
  std::vector<int> widths;  // channels per stage
  int window = 8;
  int patch = 2;  // fixed 2x2 patches

  // convolutional baseline fields
  int conv_width = 32;
  int conv_layers = 2;  // identical conv layers per stage
  int conv_stages = 4;

  int stages() const { return static_cast<int>(depths.size()); }
  int latent_width() const { return widths.back(); }
  int heads(int stage) const { return std::max(1, widths[static_cast<size_t>(stage)] / 32); }

  void validate() const {
    check_arg(patch == 2, "codec: only 2x2 patches are supported");
    check_arg(!depths.empty() && depths.size() == widths.size(),
              "codec: depths/widths must be non-empty and the same length");
    for (int d : depths) check_arg(d > 0 && d % 2 == 0, "codec: stage depths must be positive and even");
    for (int c : widths) check_arg(c > 0, "codec: stage widths must be positive");
    check_arg(window >= 1, "codec: window must be >= 1");
  }

  // Smallest legal input multiple: spatial dims must be divisible by
  // 2^stages and the deepest grid by the window.
  int input_multiple() const { return window * (1 << stages()); }
};

// ---- index maps -------------------------------------------------------------

namespace detail {

inline IndexMapPtr cached_map(const std::string& key, const std::function<IndexMap()>& build) {
  static std::mutex mu;
  static std::unordered_map<std::string, IndexMapPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ptr = std::make_shared<const IndexMap>(build());
  cache.emplace(key, ptr);
  return ptr;
}

// quadrant order: (dy,dx) = (0,0), (1,0), (0,1), (1,1)
constexpr int kQuadDy[4] = {0, 1, 0, 1};
constexpr int kQuadDx[4] = {0, 0, 1, 1};

}  // namespace detail

// [h*w, c] -> [(h/2)*(w/2), 4c]; concatenates each 2x2 neighborhood.
inline IndexMapPtr space_to_depth_map(int h, int w, int c) {
  const std::string key = "s2d:" + std::to_string(h) + "," + std::to_string(w) + "," + std::to_string(c);
  return detail::cached_map(key, [=] {
    IndexMap idx(static_cast<size_t>(h / 2) * (w / 2) * 4 * c);
    int64_t o = 0;
    for (int oy = 0; oy < h / 2; ++oy)
      for (int ox = 0; ox < w / 2; ++ox)
        for (int q = 0; q < 4; ++q)
          for (int ch = 0; ch < c; ++ch)
            idx[static_cast<size_t>(o++)] =
                (static_cast<int64_t>(2 * oy + detail::kQuadDy[q]) * w + (2 * ox + detail::kQuadDx[q])) * c + ch;
    return idx;
  });
}

// [h*w, 4c] -> [(2h)*(2w), c]; exact shape inverse of space_to_depth.
inline IndexMapPtr depth_to_space_map(int h, int w, int c) {
  const std::string key = "d2s:" + std::to_string(h) + "," + std::to_string(w) + "," + std::to_string(c);
  return detail::cached_map(key, [=] {
    IndexMap idx(static_cast<size_t>(4) * h * w * c);
    int64_t o = 0;
    for (int y = 0; y < 2 * h; ++y)
      for (int x = 0; x < 2 * w; ++x) {
        const int sy = y / 2, sx = x / 2;
        int q = 0;
        for (int i = 0; i < 4; ++i)
          if (detail::kQuadDy[i] == y % 2 && detail::kQuadDx[i] == x % 2) q = i;
        for (int ch = 0; ch < c; ++ch)
          idx[static_cast<size_t>(o++)] = (static_cast<int64_t>(sy) * w + sx) * 4 * c + q * c + ch;
      }
    return idx;
  });
}

// Cyclic shift by `shift` plus window partition in one map:
// [h*w, c] -> [nW*T, c] with T = m*m, windows in raster order.
inline IndexMapPtr window_partition_map(int h, int w, int c, int m, int shift) {
  const std::string key = "wpart:" + std::to_string(h) + "," + std::to_string(w) + "," +
                          std::to_string(c) + "," + std::to_string(m) + "," + std::to_string(shift);
  return detail::cached_map(key, [=] {
    IndexMap idx(static_cast<size_t>(h) * w * c);
    int64_t o = 0;
    for (int wy = 0; wy < h / m; ++wy)
      for (int wx = 0; wx < w / m; ++wx)
        for (int iy = 0; iy < m; ++iy)
          for (int ix = 0; ix < m; ++ix) {
            const int y = (wy * m + iy + shift) % h;
            const int x = (wx * m + ix + shift) % w;
            for (int ch = 0; ch < c; ++ch)
              idx[static_cast<size_t>(o++)] = (static_cast<int64_t>(y) * w + x) * c + ch;
          }
    return idx;
  });
}

// Inverse of window_partition_map (un-partition plus inverse shift).
inline IndexMapPtr window_reverse_map(int h, int w, int c, int m, int shift) {
  const std::string key = "wrev:" + std::to_string(h) + "," + std::to_string(w) + "," +
                          std::to_string(c) + "," + std::to_string(m) + "," + std::to_string(shift);
  return detail::cached_map(key, [=] {
    IndexMap idx(static_cast<size_t>(h) * w * c);
    const int t = m * m;
    int64_t o = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int ys = (y - shift % h + h) % h;
        const int xs = (x - shift % w + w) % w;
        const int64_t win = static_cast<int64_t>(ys / m) * (w / m) + xs / m;
        const int64_t tok = static_cast<int64_t>(ys % m) * m + xs % m;
        for (int ch = 0; ch < c; ++ch)
          idx[static_cast<size_t>(o++)] = (win * t + tok) * c + ch;
      }
    return idx;
  });
}

// Relative-position index per window: T*T entries into a (2m-1)^2 table.
inline IndexMapPtr relative_position_index(int m) {
  const std::string key = "relidx:" + std::to_string(m);
  return detail::cached_map(key, [=] {
    const int t = m * m;
    IndexMap idx(static_cast<size_t>(t) * t);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) {
        const int dy = i / m - j / m + m - 1;
        const int dx = i % m - j % m + m - 1;
        idx[static_cast<size_t>(i) * t + j] = static_cast<int64_t>(dy) * (2 * m - 1) + dx;
      }
    return idx;
  });
}

// Additive logit mask for shifted windows: 0 within a region, -100 across
// region boundaries created by the cyclic shift. Shape [nW, T, T].
template <typename S>
const Tensor<S>& shifted_attention_mask(int h, int w, int m, int shift) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::unique_ptr<Tensor<S>>> cache;
  const std::string key = std::to_string(h) + "," + std::to_string(w) + "," + std::to_string(m) +
                          "," + std::to_string(shift);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const int t = m * m;
  const int nw = (h / m) * (w / m);
  auto mask = std::make_unique<Tensor<S>>(std::vector<int>{nw, t, t});
  std::vector<int> region(static_cast<size_t>(h) * w);
  auto region_of = [&](int v, int extent) {
    if (v < extent - m) return 0;
    if (v < extent - shift) return 1;
    return 2;
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      region[static_cast<size_t>(y) * w + x] = region_of(y, h) * 3 + region_of(x, w);
  for (int wy = 0; wy < h / m; ++wy)
    for (int wx = 0; wx < w / m; ++wx) {
      const int win = wy * (w / m) + wx;
      for (int a = 0; a < t; ++a)
        for (int b = 0; b < t; ++b) {
          const int ra = region[static_cast<size_t>(wy * m + a / m) * w + (wx * m + a % m)];
          const int rb = region[static_cast<size_t>(wy * m + b / m) * w + (wx * m + b % m)];
          (*mask)[static_cast<int64_t>(win) * t * t + a * t + b] = ra == rb ? S(0) : S(-100);
        }
    }
  const Tensor<S>& ref = *mask;
  cache.emplace(key, std::move(mask));
  return ref;
}

// ---- blocks -------------------------------------------------------------------

// One Swin block: pre-norm windowed MSA with relative position bias and a
// residual MLP (expansion 4, GELU). `shifted` selects the SW-MSA form with
// shift = window/2 and cross-boundary masking.
template <typename S>
struct SwinBlock {
  LayerNorm<S> ln1, ln2;
  Linear<S> qkv, proj, fc1, fc2;
  Parameter<S>* rel_bias = nullptr;
  int width = 0, window = 0, heads = 1;
  bool shifted = false;

  SwinBlock() = default;
  SwinBlock(ParamStore<S>& ps, const std::string& name, int width_, int window_, int heads_,
            bool shifted_)
      : ln1(ps, name + ".ln1", width_),
        ln2(ps, name + ".ln2", width_),
        qkv(ps, name + ".attn.qkv", width_, 3 * width_),
        proj(ps, name + ".attn.proj", width_, width_),
        fc1(ps, name + ".mlp.fc1", width_, 4 * width_),
        fc2(ps, name + ".mlp.fc2", 4 * width_, width_),
        width(width_),
        window(window_),
        heads(heads_),
        shifted(shifted_) {
    rel_bias = &ps.add(name + ".attn.rel_bias", {(2 * window_ - 1) * (2 * window_ - 1), heads_});
  }

  void init(Rng& rng) {
    qkv.init_truncated(rng);
    proj.init_truncated(rng);
    fc1.init_truncated(rng);
    fc2.init_truncated(rng);
    rel_bias->value.fill_truncated_normal(rng, 0.02);
  }

  Var<S> apply(Graph<S>& g, Var<S> x, int h, int w, Tensor<S>* probs_out = nullptr) const {
    check_arg(h % window == 0 && w % window == 0,
              "swin block: window does not divide the token grid");
    const int shift = shifted ? window / 2 : 0;
    const int t = window * window;
    Var<S> y = ln1.apply(g, x);
    y = g.gather(y, y->val().shape(), window_partition_map(h, w, width, window, shift));
    y = qkv.apply(g, y);
    const Tensor<S>* mask = shift > 0 ? &shifted_attention_mask<S>(h, w, window, shift) : nullptr;
    y = g.window_attention(y, heads, t, g.leaf(*rel_bias), relative_position_index(window), mask,
                           probs_out);
    y = proj.apply(g, y);
    y = g.gather(y, y->val().shape(), window_reverse_map(h, w, width, window, shift));
    x = g.add(x, y);
    Var<S> z = ln2.apply(g, x);
    z = fc2.apply(g, g.gelu(fc1.apply(g, z)));
    return g.add(x, z);
  }
};

// Two successive blocks: W-MSA followed by SW-MSA.
template <typename S>
struct SwinBlockPair {
  SwinBlock<S> first, second;

  SwinBlockPair() = default;
  SwinBlockPair(ParamStore<S>& ps, const std::string& name, int width, int window, int heads)
      : first(ps, name + ".w", width, window, heads, false),
        second(ps, name + ".sw", width, window, heads, true) {}

  void init(Rng& rng) {
    first.init(rng);
    second.init(rng);
  }

  Var<S> apply(Graph<S>& g, Var<S> x, int h, int w) const {
    return second.apply(g, first.apply(g, x, h, w), h, w);
  }
};

// ---- encoder / decoder ---------------------------------------------------------

template <typename S>
struct SwinEncoder {
  CodecConfig cfg;
  Linear<S> embed;  // 12 -> C1
  std::vector<std::vector<SwinBlockPair<S>>> stages;
  std::vector<Linear<S>> merges;  // 4*C_i -> C_{i+1}

  SwinEncoder() = default;
  SwinEncoder(ParamStore<S>& ps, const std::string& name, const CodecConfig& cfg_) : cfg(cfg_) {
    cfg.validate();
    embed = Linear<S>(ps, name + ".embed", 12, cfg.widths[0]);
    for (int i = 0; i < cfg.stages(); ++i) {
      std::vector<SwinBlockPair<S>> blocks;
      for (int p = 0; p < cfg.depths[static_cast<size_t>(i)] / 2; ++p)
        blocks.emplace_back(ps, name + ".stage" + std::to_string(i) + ".pair" + std::to_string(p),
                            cfg.widths[static_cast<size_t>(i)], cfg.window, cfg.heads(i));
      stages.push_back(std::move(blocks));
      if (i + 1 < cfg.stages())
        merges.emplace_back(ps, name + ".merge" + std::to_string(i),
                            4 * cfg.widths[static_cast<size_t>(i)],
                            cfg.widths[static_cast<size_t>(i + 1)]);
    }
  }

  void init(Rng& rng) {
    embed.init_truncated(rng);
    for (auto& st : stages)
      for (auto& b : st) b.init(rng);
    for (auto& m : merges) m.init_truncated(rng);
  }

  void check_input(int h, int w) const {
    check_arg(h % 2 == 0 && w % 2 == 0, "patch embed: image dimensions must be even");
    const int down = 1 << cfg.stages();
    check_arg(h % down == 0 && w % down == 0,
              "encoder: image dimensions must be multiples of 2^stages");
    check_arg((h / down) % cfg.window == 0 && (w / down) % cfg.window == 0,
              "encoder: window must divide the deepest token grid");
  }

  // image: [H*W, 3] rows; returns latent [l_s, C_s].
  Var<S> apply(Graph<S>& g, Var<S> image, int h_img, int w_img) const {
    check_input(h_img, w_img);
    int h = h_img / 2, w = w_img / 2;
    Var<S> x = g.gather(image, {h * w, 12}, space_to_depth_map(h_img, w_img, 3));
    x = embed.apply(g, x);
    for (int i = 0; i < cfg.stages(); ++i) {
      for (const auto& pair : stages[static_cast<size_t>(i)]) x = pair.apply(g, x, h, w);
      if (i + 1 < cfg.stages()) {
        x = g.gather(x, {(h / 2) * (w / 2), 4 * cfg.widths[static_cast<size_t>(i)]},
                     space_to_depth_map(h, w, cfg.widths[static_cast<size_t>(i)]));
        x = merges[static_cast<size_t>(i)].apply(g, x);
        h /= 2;
        w /= 2;
      }
    }
    return x;
  }
};

template <typename S>
struct SwinDecoder {
  CodecConfig cfg;
  std::vector<std::vector<SwinBlockPair<S>>> stages;  // indexed by stage, applied deepest-first
  std::vector<Linear<S>> divides;                     // C_{i+1} -> 4*C_i
  Linear<S> head;                                     // C1 -> 12

  SwinDecoder() = default;
  SwinDecoder(ParamStore<S>& ps, const std::string& name, const CodecConfig& cfg_) : cfg(cfg_) {
    cfg.validate();
    stages.resize(static_cast<size_t>(cfg.stages()));
    for (int i = 0; i < cfg.stages(); ++i) {
      for (int p = 0; p < cfg.depths[static_cast<size_t>(i)] / 2; ++p)
        stages[static_cast<size_t>(i)].emplace_back(
            ps, name + ".stage" + std::to_string(i) + ".pair" + std::to_string(p),
            cfg.widths[static_cast<size_t>(i)], cfg.window, cfg.heads(i));
      if (i + 1 < cfg.stages())
        divides.emplace_back(ps, name + ".divide" + std::to_string(i),
                             cfg.widths[static_cast<size_t>(i + 1)],
                             4 * cfg.widths[static_cast<size_t>(i)]);
    }
    head = Linear<S>(ps, name + ".head", cfg.widths[0], 12);
  }

  void init(Rng& rng) {
    for (auto& st : stages)
      for (auto& b : st) b.init(rng);
    for (auto& d : divides) d.init_truncated(rng);
    head.init_truncated(rng);
  }

  // latent: [l_s, C_s]; returns unclamped image [H*W, 3].
  Var<S> apply(Graph<S>& g, Var<S> latent, int h_img, int w_img) const {
    const int down = 1 << cfg.stages();
    int h = h_img / down, w = w_img / down;
    Var<S> x = latent;
    for (int i = cfg.stages() - 1; i >= 0; --i) {
      for (const auto& pair : stages[static_cast<size_t>(i)]) x = pair.apply(g, x, h, w);
      if (i > 0) {
        x = divides[static_cast<size_t>(i - 1)].apply(g, x);
        x = g.gather(x, {(2 * h) * (2 * w), cfg.widths[static_cast<size_t>(i - 1)]},
                     depth_to_space_map(h, w, cfg.widths[static_cast<size_t>(i - 1)]));
        h *= 2;
        w *= 2;
      }
    }
    x = head.apply(g, x);
    return g.gather(x, {h_img * w_img, 3}, depth_to_space_map(h, w, 3));
  }
};

// ---- convolutional baseline ------------------------------------------------------

// im2col: [h*w, cin] -> [ho*wo, k*k*cin], zero padding encoded as -1.
inline IndexMapPtr im2col_map(int h, int w, int cin, int k, int stride, int pad) {
  const std::string key = "im2col:" + std::to_string(h) + "," + std::to_string(w) + "," +
                          std::to_string(cin) + "," + std::to_string(k) + "," +
                          std::to_string(stride) + "," + std::to_string(pad);
  return detail::cached_map(key, [=] {
    const int ho = (h + 2 * pad - k) / stride + 1;
    const int wo = (w + 2 * pad - k) / stride + 1;
    IndexMap idx(static_cast<size_t>(ho) * wo * k * k * cin);
    int64_t o = 0;
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox)
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int iy = oy * stride + ky - pad;
            const int ix = ox * stride + kx - pad;
            const bool ok = iy >= 0 && iy < h && ix >= 0 && ix < w;
            for (int ch = 0; ch < cin; ++ch)
              idx[static_cast<size_t>(o++)] =
                  ok ? (static_cast<int64_t>(iy) * w + ix) * cin + ch : -1;
          }
    return idx;
  });
}

// Fixed-width CNN encoder used for the model-capacity study: `stages`
// stages of `layers` identical 3x3 convolutions, the first of each stage
// carrying the stride-2 downsampling.
template <typename S>
struct ConvBackbone {
  int width = 32, layers = 2, nstages = 4, kernel = 3;
  std::vector<Linear<S>> convs;  // [k*k*cin, cout] each

  ConvBackbone() = default;
  ConvBackbone(ParamStore<S>& ps, const std::string& name, int width_, int layers_, int nstages_)
      : width(width_), layers(layers_), nstages(nstages_) {
    check_arg(width >= 1 && layers >= 1 && nstages >= 1, "conv backbone: bad config");
    int cin = 3;
    for (int s = 0; s < nstages; ++s)
      for (int l = 0; l < layers; ++l) {
        convs.emplace_back(ps, name + ".s" + std::to_string(s) + ".conv" + std::to_string(l),
                           kernel * kernel * cin, width);
        cin = width;
      }
  }

  void init(Rng& rng) {
    for (auto& c : convs) c.init_truncated(rng);
  }

  Var<S> apply(Graph<S>& g, Var<S> image, int h, int w) const {
    Var<S> x = image;
    int cin = 3;
    size_t li = 0;
    for (int s = 0; s < nstages; ++s) {
      for (int l = 0; l < layers; ++l, ++li) {
        const int stride = l == 0 ? 2 : 1;
        const int ho = (h + 2 - kernel) / stride + 1;
        const int wo = (w + 2 - kernel) / stride + 1;
        x = g.gather(x, {ho * wo, kernel * kernel * cin}, im2col_map(h, w, cin, kernel, stride, 1));
        x = convs[li].apply(g, x);
        const bool last = s == nstages - 1 && l == layers - 1;
        if (!last) x = g.relu(x);
        h = ho;
        w = wo;
        cin = width;
      }
    }
    return x;
  }
};

}  // namespace swjc
