// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/rate_mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swjc {

int cbr_to_channels(double cbr, int stages, int latent_width) {
  check_arg(std::isfinite(cbr) && cbr > 0.0, "rate: CBR must be positive and finite");
  const double denom = 2.0 * 3.0 * std::pow(4.0, stages);
  const int c = static_cast<int>(std::lround(cbr * denom));
  if (c < 1 || c > latent_width)
    throw InvalidArgument("rate: CBR " + std::to_string(cbr) + " maps to " + std::to_string(c) +
                          " channels, outside [1, " + std::to_string(latent_width) + "]");
  return c;
}

double channels_to_cbr(int channels, int stages) {
  return static_cast<double>(channels) / (2.0 * 3.0 * std::pow(4.0, stages));
}

ChannelMask code_mask(const std::vector<double>& channel_means, int keep_count) {
  const int n = static_cast<int>(channel_means.size());
  check_arg(keep_count >= 1 && keep_count <= n, "code mask: keep count out of range");
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // stable sort by descending relevance keeps lower indices first on ties
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return channel_means[static_cast<size_t>(a)] > channel_means[static_cast<size_t>(b)];
  });
  ChannelMask m;
  m.keep.assign(static_cast<size_t>(n), 0);
  m.kept = keep_count;
  for (int i = 0; i < keep_count; ++i) m.keep[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;
  return m;
}

SideInfoCost mask_side_info_cost(const ChannelMask& mask) {
  const int n = mask.width();
  const int k = mask.kept;
  SideInfoCost cost;
  cost.raw_bits = static_cast<double>(n);
  if (k <= 0 || k >= n) {
    cost.bound_bits = 0.0;  // binomial(n,0) = binomial(n,n) = 1
  } else {
    const double log2_binom =
        (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
    cost.bound_bits = std::ceil(log2_binom);
  }
  return cost;
}

double side_info_symbols(double bits, double snr_db) {
  const double capacity = std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
  return bits / capacity;
}

}  // namespace swjc
