// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Code-mask arithmetic shared by the rate-adaptive path and the harness:
// CBR <-> kept-channel-count conversion, top-C channel selection, and the
// side-information cost of shipping the mask.

#pragma once

#include <cstdint>
#include <vector>

#include "swjc/common.hpp"

namespace swjc {

// Binary per-channel keep vector plus its population count.
struct ChannelMask {
  std::vector<uint8_t> keep;
  int kept = 0;

  int width() const { return static_cast<int>(keep.size()); }

  static ChannelMask all_ones(int width) {
    ChannelMask m;
    m.keep.assign(static_cast<size_t>(width), 1);
    m.kept = width;
    return m;
  }
};

// C = round(R * 2*3*4^stages); errors when the result falls outside
// [1, latent_width].
int cbr_to_channels(double cbr, int stages, int latent_width);

// Exact CBR realized by keeping `channels` latent channels.
double channels_to_cbr(int channels, int stages);

// Keeps the `keep_count` channels of highest relevance (spatial mean),
// ties broken toward the lower channel index.
ChannelMask code_mask(const std::vector<double>& channel_means, int keep_count);

struct SideInfoCost {
  double raw_bits;    // one bit per latent channel
  double bound_bits;  // ceil(log2 C(n, k)) via log-gamma
};

SideInfoCost mask_side_info_cost(const ChannelMask& mask);

// Ideal-capacity conversion of side-information bits to channel symbols.
double side_info_symbols(double bits, double snr_db);

}  // namespace swjc
