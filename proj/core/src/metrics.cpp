// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/metrics.hpp"

#include <cmath>

#include "swjc/common.hpp"

namespace swjc {

double psnr(const Tensor<double>& a, const Tensor<double>& b) {
  check_arg(a.same_shape(b), "psnr: shape mismatch");
  check_arg(a.size() > 0, "psnr: empty input");
  double mse = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) * 255.0;
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ms_ssim_db(double msssim) {
  check_arg(msssim >= 0.0 && msssim <= 1.0, "ms_ssim_db: score must be in [0,1]");
  if (msssim >= 1.0) return kMsssimDbCap;
  return std::min(kMsssimDbCap, -10.0 * std::log10(1.0 - msssim));
}

}  // namespace swjc
