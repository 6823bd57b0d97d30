// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Symbol-level channel front end: unit-power normalization, AWGN and
// Rayleigh fading simulation, MMSE equalization. Symbol vectors are flat
// tensors of 2k reals, consecutive pairs forming k complex symbols.

#pragma once

#include <cmath>
#include <memory>

#include "swjc/graph.hpp"
#include "swjc/rng.hpp"

namespace swjc {

enum class ChannelKind { Awgn, RayleighFast, RayleighBlock };

inline const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::Awgn: return "awgn";
    case ChannelKind::RayleighFast: return "rayleigh-fast";
    case ChannelKind::RayleighBlock: return "rayleigh-block";
  }
  return "?";
}

// Noise variance per complex symbol under unit signal power.
inline double snr_to_sigma2(double snr_db) {
  check_arg(std::isfinite(snr_db), "snr must be finite");
  return std::pow(10.0, -snr_db / 10.0);
}

// One channel use: fading taps (h == 1 for AWGN), noise variance, seed.
template <typename S>
struct ChannelRealization {
  ChannelKind kind = ChannelKind::Awgn;
  std::shared_ptr<Tensor<S>> h;  // [2k] re/im pairs; null means h == 1
  double sigma2 = 0.0;
  uint64_t seed = 0;

  int symbol_count() const { return h ? static_cast<int>(h->size() / 2) : 0; }
};

// y + n with circularly symmetric complex Gaussian noise of per-symbol
// variance sigma2. Noise is a constant w.r.t. gradients.
template <typename S>
Var<S> transmit_awgn(Graph<S>& g, Var<S> y, double snr_db, uint64_t seed) {
  const double sigma2 = snr_to_sigma2(snr_db);
  Tensor<S> noise(y->val().shape());
  if (sigma2 > 0.0) {
    Rng rng(seed);
    const double comp_std = std::sqrt(sigma2 / 2.0);
    for (int64_t i = 0; i < noise.size(); ++i) noise[i] = static_cast<S>(rng.normal() * comp_std);
  }
  return g.add(y, g.constant(std::move(noise)));
}

// h o y + n; fast mode draws one complex tap per symbol, block mode one tap
// per frame, both with E|h|^2 = 1. Returns the realization for the receiver.
template <typename S>
Var<S> transmit_fading(Graph<S>& g, Var<S> y, double snr_db, ChannelKind kind, uint64_t seed,
                       ChannelRealization<S>* realization) {
  check_arg(kind == ChannelKind::RayleighFast || kind == ChannelKind::RayleighBlock,
            "transmit_fading: not a fading channel kind");
  const double sigma2 = snr_to_sigma2(snr_db);
  const int64_t n = y->val().size();
  Rng rng(seed);
  auto h = std::make_shared<Tensor<S>>(y->val().shape());
  const double tap_std = std::sqrt(0.5);  // per component, E|h|^2 = 1
  if (kind == ChannelKind::RayleighFast) {
    for (int64_t i = 0; i < n; ++i) (*h)[i] = static_cast<S>(rng.normal() * tap_std);
  } else {
    const S re = static_cast<S>(rng.normal() * tap_std);
    const S im = static_cast<S>(rng.normal() * tap_std);
    for (int64_t i = 0; i < n; i += 2) {
      (*h)[i] = re;
      (*h)[i + 1] = im;
    }
  }
  Var<S> faded = g.complex_scale(y, h);
  Tensor<S> noise(y->val().shape());
  if (sigma2 > 0.0) {
    const double comp_std = std::sqrt(sigma2 / 2.0);
    for (int64_t i = 0; i < n; ++i) noise[i] = static_cast<S>(rng.normal() * comp_std);
  }
  if (realization) {
    realization->kind = kind;
    realization->h = h;
    realization->sigma2 = sigma2;
    realization->seed = seed;
  }
  return g.add(faded, g.constant(std::move(noise)));
}

// Per-symbol MMSE scaling with perfect CSI: conj(h) * y / (|h|^2 + sigma2).
template <typename S>
Var<S> equalize(Graph<S>& g, Var<S> received, const ChannelRealization<S>& csi) {
  check_arg(csi.h != nullptr, "equalize: realization has no CSI");
  check_arg(csi.h->size() == received->val().size(), "equalize: CSI length mismatch");
  auto coeff = std::make_shared<Tensor<S>>(csi.h->shape());
  for (int64_t i = 0; i < csi.h->size(); i += 2) {
    const double re = static_cast<double>((*csi.h)[i]);
    const double im = static_cast<double>((*csi.h)[i + 1]);
    const double denom = re * re + im * im + csi.sigma2;
    (*coeff)[i] = static_cast<S>(re / denom);
    (*coeff)[i + 1] = static_cast<S>(-im / denom);
  }
  return g.complex_scale(received, coeff);
}

// Dispatcher used by training and sweeps; applies MMSE equalization after
// fading when requested.
template <typename S>
Var<S> transmit(Graph<S>& g, Var<S> y, ChannelKind kind, double snr_db, uint64_t seed,
                bool equalize_rx = true) {
  if (kind == ChannelKind::Awgn) return transmit_awgn(g, y, snr_db, seed);
  ChannelRealization<S> real;
  Var<S> rx = transmit_fading(g, y, snr_db, kind, seed, &real);
  return equalize_rx ? equalize(g, rx, real) : rx;
}

// Plain-tensor convenience wrappers (statistics tests, harness accounting).
template <typename S>
Tensor<S> power_normalize_tensor(const Tensor<S>& raw) {
  Graph<S> g(false);
  return g.power_normalize(g.input(raw))->val();
}

template <typename S>
Tensor<S> transmit_awgn_tensor(const Tensor<S>& y, double snr_db, uint64_t seed) {
  Graph<S> g(false);
  return transmit_awgn(g, g.input(y), snr_db, seed)->val();
}

}  // namespace swjc
