// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "swjc/tensor.hpp"

namespace swjc {

// Finite caps keep degenerate comparisons CSV-friendly.
inline constexpr double kPsnrCap = 100.0;
inline constexpr double kMsssimDbCap = 60.0;

// Peak signal-to-noise ratio on the 8-bit scale; inputs live in [0,1].
// Identical images return kPsnrCap.
double psnr(const Tensor<double>& a, const Tensor<double>& b);

// Five-scale structural similarity (11-tap Gaussian windows, sigma 1.5,
// reflect boundaries, luminance at the coarsest scale, standard exponents).
// Requires min(H, W) >= 160.
double ms_ssim(const Tensor<double>& a, const Tensor<double>& b);

// Same value plus the analytic gradient w.r.t. the second argument; used
// by the perceptual training loss.
double ms_ssim_with_grad(const Tensor<double>& a, const Tensor<double>& b, Tensor<double>* grad_b);

// -10*log10(1 - v); v == 1 returns kMsssimDbCap.
double ms_ssim_db(double msssim);

template <typename S>
Tensor<double> to_double(const Tensor<S>& t) {
  return t.template cast<double>();
}

// One cell of a rate-distortion curve. `value` is the quality score
// (PSNR dB or MS-SSIM dB), higher is better.
struct RdPoint {
  double cbr = 0.0;
  double snr_db = 0.0;
  double value = 0.0;
};

// Bjontegaard delta rate of curve_b against curve_a, in percent; negative
// means curve_b needs less rate at equal quality. Piecewise-cubic (PCHIP)
// interpolation of log10(rate) over quality, integrated over the
// overlapping quality range. Requires >= 4 points per curve and quality
// strictly increasing with rate.
double bd_rate_percent(std::vector<RdPoint> curve_a, std::vector<RdPoint> curve_b);

}  // namespace swjc
