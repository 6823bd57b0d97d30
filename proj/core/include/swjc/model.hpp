// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end transmission model: hierarchical attention codec with
// optional SNR-conditioned (channel) and rate-conditioned modulation.
// Four variants:
//   baseline  - neither ModNet; a fixed affine pair sets the bandwidth
//   sa        - channel ModNets in encoder and decoder, fixed bandwidth head
//   ra        - rate ModNet with top-C channel mask, no channel ModNet
//   sa_ra     - both

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swjc/channel.hpp"
#include "swjc/channel_modnet.hpp"
#include "swjc/codec.hpp"
#include "swjc/rate_mask.hpp"

namespace swjc {

enum class Variant { Baseline, Sa, Ra, SaRa };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Sa: return "sa";
    case Variant::Ra: return "ra";
    case Variant::SaRa: return "sa_ra";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "baseline") return Variant::Baseline;
  if (s == "sa") return Variant::Sa;
  if (s == "ra") return Variant::Ra;
  if (s == "sa_ra") return Variant::SaRa;
  throw InvalidArgument("unknown variant: " + s);
}

struct ModelConfig {
  CodecConfig codec;
  Variant variant = Variant::SaRa;
  double fixed_cbr = 0.0625;  // bandwidth of the non-rate-adaptive variants
  int sm_hidden = 64;

  bool has_channel_modnet() const { return variant == Variant::Sa || variant == Variant::SaRa; }
  bool has_rate_modnet() const { return variant == Variant::Ra || variant == Variant::SaRa; }

  std::vector<std::pair<std::string, std::string>> to_keyvals() const;
  static ModelConfig from_keyvals(const std::map<std::string, std::string>& kv);
};

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

inline std::vector<std::pair<std::string, std::string>> ModelConfig::to_keyvals() const {
  return {
      {"model.variant", variant_name(variant)},
      {"model.depths", join_ints(codec.depths)},
      {"model.widths", join_ints(codec.widths)},
      {"model.window", std::to_string(codec.window)},
      {"model.fixed_cbr", std::to_string(fixed_cbr)},
      {"model.sm_hidden", std::to_string(sm_hidden)},
  };
}

inline ModelConfig ModelConfig::from_keyvals(const std::map<std::string, std::string>& kv) {
  ModelConfig cfg;
  auto need = [&](const std::string& k) {
    auto it = kv.find(k);
    check_arg(it != kv.end(), "model config: missing key " + k);
    return it->second;
  };
  cfg.variant = variant_from_name(need("model.variant"));
  cfg.codec.depths = parse_ints(need("model.depths"));
  cfg.codec.widths = parse_ints(need("model.widths"));
  cfg.codec.window = std::stoi(need("model.window"));
  cfg.fixed_cbr = std::stod(need("model.fixed_cbr"));
  cfg.sm_hidden = std::stoi(need("model.sm_hidden"));
  return cfg;
}

template <typename S>
class Model {
 public:
  Model(ModelConfig cfg, uint64_t init_seed) : cfg_(std::move(cfg)) {
    cfg_.codec.validate();
    enc_ = SwinEncoder<S>(params_, "encoder", cfg_.codec);
    if (cfg_.has_channel_modnet()) {
      chan_mod_enc_ = ModNet<S>(params_, "chan_mod_enc", cfg_.codec.latent_width(), cfg_.sm_hidden);
      chan_mod_dec_ = ModNet<S>(params_, "chan_mod_dec", cfg_.codec.latent_width(), cfg_.sm_hidden);
    }
    if (cfg_.has_rate_modnet()) {
      rate_mod_ = ModNet<S>(params_, "rate_mod", cfg_.codec.latent_width(), cfg_.sm_hidden);
    } else {
      fixed_channels_ =
          cbr_to_channels(cfg_.fixed_cbr, cfg_.codec.stages(), cfg_.codec.latent_width());
      bw_head_enc_ = Linear<S>(params_, "bw_head_enc", cfg_.codec.latent_width(), fixed_channels_);
      bw_head_dec_ = Linear<S>(params_, "bw_head_dec", fixed_channels_, cfg_.codec.latent_width());
    }
    dec_ = SwinDecoder<S>(params_, "decoder", cfg_.codec);

    Rng rng(init_seed);
    enc_.init(rng);
    if (cfg_.has_channel_modnet()) {
      chan_mod_enc_.init(rng);
      chan_mod_dec_.init(rng);
    }
    if (cfg_.has_rate_modnet()) {
      rate_mod_.init(rng);
    } else {
      // unit-scale pair: power normalization fixes the transmit scale, the
      // decoder-side head restores full latent width
      bw_head_enc_.init_scaled(rng, 1.0);
      bw_head_dec_.init_scaled(rng, 1.0);
    }
    dec_.init(rng);
  }

  struct Encoded {
    Var<S> symbols = nullptr;  // [2k], unit mean symbol power
    ChannelMask mask;
    int k = 0;
    bool channel_modulated = false;
    bool rate_modulated = false;
  };

  // f_e(x, SNR, R): stages -> (channel ModNet) -> (rate ModNet + mask |
  // bandwidth head) -> compact -> pair -> power-normalize.
  Encoded encode(Graph<S>& g, Var<S> image, int h_img, int w_img, double snr_db,
                 double cbr) const {
    Encoded out;
    Var<S> y = enc_.apply(g, image, h_img, w_img);
    const int cs = cfg_.codec.latent_width();
    const int l = static_cast<int>(y->val().size() / cs);
    if (cfg_.has_channel_modnet()) {
      y = chan_mod_enc_.apply(g, y, scalar_token(g, snr_db));
      out.channel_modulated = true;
    }
    int c_keep = 0;
    if (cfg_.has_rate_modnet()) {
      c_keep = cbr_to_channels(cbr, cfg_.codec.stages(), cs);
      y = rate_mod_.apply(g, y, scalar_token(g, cbr));
      out.rate_modulated = true;
      std::vector<double> means = column_means(y->val(), l, cs);
      out.mask = code_mask(means, c_keep);
      Tensor<S> mask_vec({cs});
      for (int c = 0; c < cs; ++c) mask_vec[c] = static_cast<S>(out.mask.keep[static_cast<size_t>(c)]);
      y = g.row_mul(y, g.constant(std::move(mask_vec)));
      y = g.gather(y, {l, c_keep}, compact_map(out.mask, l));
    } else {
      check_arg(cbr_to_channels(cbr, cfg_.codec.stages(), cs) == fixed_channels_,
                "encode: this variant transmits at its fixed CBR only");
      c_keep = fixed_channels_;
      y = bw_head_enc_.apply(g, y);
      out.mask = ChannelMask::all_ones(c_keep);
    }
    check_arg((static_cast<int64_t>(l) * c_keep) % 2 == 0,
              "encode: latent does not pair into complex symbols");
    out.k = l * c_keep / 2;
    y = g.reshape(y, {2 * out.k});
    out.symbols = g.power_normalize(y);
    return out;
  }

  struct Decoded {
    Var<S> image = nullptr;            // [H, W, 3], clamped to [0,1]
    Var<S> image_unclamped = nullptr;  // training target surface
  };

  // f_d(y_hat, M): scatter/expand -> (channel ModNet) -> mirrored stages ->
  // projection head; output clamped to [0,1].
  Decoded decode(Graph<S>& g, Var<S> received, const ChannelMask& mask, double snr_db, int h_img,
                 int w_img) const {
    const int cs = cfg_.codec.latent_width();
    const int down = 1 << cfg_.codec.stages();
    check_arg(h_img % down == 0 && w_img % down == 0, "decode: bad image dimensions");
    const int l = (h_img / down) * (w_img / down);
    check_arg(mask.kept > 0, "decode: empty mask");
    check_arg(received->val().size() == static_cast<int64_t>(l) * mask.kept,
              "decode: mask kept-count does not match received symbol count");
    Var<S> x = g.reshape(received, {l, mask.kept});
    if (cfg_.has_rate_modnet()) {
      check_arg(mask.width() == cs, "decode: mask width must equal the latent width");
      x = g.gather(x, {l, cs}, scatter_map(mask, l));
    } else {
      check_arg(mask.width() == fixed_channels_ && mask.kept == fixed_channels_,
                "decode: expected the full fixed-bandwidth mask");
      x = bw_head_dec_.apply(g, x);
    }
    if (cfg_.has_channel_modnet()) x = chan_mod_dec_.apply(g, x, scalar_token(g, snr_db));
    Var<S> img = dec_.apply(g, x, h_img, w_img);
    Decoded out;
    out.image_unclamped = g.reshape(img, {h_img, w_img, 3});
    out.image = g.clamp01(out.image_unclamped);
    return out;
  }

  struct ChainResult {
    Encoded enc;
    Decoded dec;
  };

  // encode -> channel -> (equalize) -> decode under one graph.
  ChainResult forward_chain(Graph<S>& g, Var<S> image, int h_img, int w_img, double snr_db,
                            double cbr, ChannelKind kind, uint64_t noise_seed,
                            bool equalize_rx = true) const {
    ChainResult r;
    r.enc = encode(g, image, h_img, w_img, snr_db, cbr);
    Var<S> rx = transmit(g, r.enc.symbols, kind, snr_db, noise_seed, equalize_rx);
    r.dec = decode(g, rx, r.enc.mask, snr_db, h_img, w_img);
    return r;
  }

  // Convenience inference: returns the clamped reconstruction.
  Tensor<S> transmit_image(const Tensor<S>& image, double snr_db, double cbr, ChannelKind kind,
                           uint64_t noise_seed, bool equalize_rx = true) const {
    check_arg(image.rank() == 3 && image.dim(2) == 3, "transmit_image: expected [H,W,3]");
    Graph<S> g(false);
    Var<S> x = g.input(image);
    auto r = forward_chain(g, x, image.dim(0), image.dim(1), snr_db, cbr, kind, noise_seed,
                           equalize_rx);
    return r.dec.image->val();
  }

  static bool is_modnet_param(const std::string& name) {
    return name.rfind("chan_mod_", 0) == 0 || name.rfind("rate_mod", 0) == 0;
  }

  const ModelConfig& config() const { return cfg_; }
  ParamStore<S>& params() { return params_; }
  const ParamStore<S>& params() const { return params_; }
  const SwinEncoder<S>& encoder() const { return enc_; }
  int fixed_channels() const { return fixed_channels_; }

 private:
  static Var<S> scalar_token(Graph<S>& g, double v) {
    Tensor<S> t({1, 1});
    t[0] = static_cast<S>(v);
    return g.constant(std::move(t));
  }

  static std::vector<double> column_means(const Tensor<S>& x, int rows, int cols) {
    std::vector<double> means(static_cast<size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) means[static_cast<size_t>(c)] += static_cast<double>(x[static_cast<int64_t>(r) * cols + c]);
    for (auto& m : means) m /= rows;
    return means;
  }

  static IndexMapPtr compact_map(const ChannelMask& mask, int rows) {
    const int cs = mask.width();
    std::vector<int> kept_cols;
    for (int c = 0; c < cs; ++c)
      if (mask.keep[static_cast<size_t>(c)]) kept_cols.push_back(c);
    IndexMap idx(static_cast<size_t>(rows) * kept_cols.size());
    int64_t o = 0;
    for (int r = 0; r < rows; ++r)
      for (int c : kept_cols) idx[static_cast<size_t>(o++)] = static_cast<int64_t>(r) * cs + c;
    return std::make_shared<const IndexMap>(std::move(idx));
  }

  static IndexMapPtr scatter_map(const ChannelMask& mask, int rows) {
    const int cs = mask.width();
    std::vector<int64_t> pos(static_cast<size_t>(cs), -1);
    int64_t p = 0;
    for (int c = 0; c < cs; ++c)
      if (mask.keep[static_cast<size_t>(c)]) pos[static_cast<size_t>(c)] = p++;
    IndexMap idx(static_cast<size_t>(rows) * cs);
    int64_t o = 0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cs; ++c)
        idx[static_cast<size_t>(o++)] =
            pos[static_cast<size_t>(c)] < 0 ? -1 : static_cast<int64_t>(r) * mask.kept + pos[static_cast<size_t>(c)];
    return std::make_shared<const IndexMap>(std::move(idx));
  }

  ModelConfig cfg_;
  ParamStore<S> params_;
  SwinEncoder<S> enc_;
  SwinDecoder<S> dec_;
  ModNet<S> chan_mod_enc_, chan_mod_dec_, rate_mod_;
  Linear<S> bw_head_enc_, bw_head_dec_;
  int fixed_channels_ = 0;
};

}  // namespace swjc
