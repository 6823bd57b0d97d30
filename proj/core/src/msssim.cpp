// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// MS-SSIM after Wang, Simoncelli & Bovik (five dyadic scales): contrast and
// structure at every scale, luminance at the coarsest, combined
// multiplicatively with the standard exponents. Windows are 11-tap
// Gaussians (sigma 1.5) with reflect boundaries; scales step down by 2x2
// mean pooling. A per-scale mean that turns negative is clamped to zero.
//
// The gradient path mirrors the forward exactly: adjoint Gaussian filtering
// (reflect-pad transpose), adjoint mean pooling, product rule across the
// per-scale means.

#include <array>
#include <cmath>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/metrics.hpp"

namespace swjc {
namespace {

constexpr int kScales = 5;
constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;
constexpr std::array<double, kScales> kWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kMinSide = 160;

const std::array<double, kWin>& gaussian_taps() {
  static const std::array<double, kWin> taps = [] {
    std::array<double, kWin> t{};
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
      const double d = i - (kWin - 1) / 2.0;
      t[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
      sum += t[static_cast<size_t>(i)];
    }
    for (auto& v : t) v /= sum;
    return t;
  }();
  return taps;
}

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  Plane() = default;
  Plane(int h_, int w_) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, 0.0) {}
  double& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
};

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

// Reflect-boundary separable Gaussian filter, same-size output.
Plane gauss(const Plane& x) {
  const auto& k = gaussian_taps();
  const int r = kWin / 2;
  Plane tmp(x.h, x.w), out(x.h, x.w);
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx) {
      double s = 0.0;
      for (int a = 0; a < kWin; ++a) s += k[static_cast<size_t>(a)] * x.at(y, reflect(xx + a - r, x.w));
      tmp.at(y, xx) = s;
    }
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx) {
      double s = 0.0;
      for (int a = 0; a < kWin; ++a) s += k[static_cast<size_t>(a)] * tmp.at(reflect(y + a - r, x.h), xx);
      out.at(y, xx) = s;
    }
  return out;
}

// Adjoint of gauss(): scatter through the transposed taps and reflected
// boundary bins.
Plane gauss_adjoint(const Plane& u) {
  const auto& k = gaussian_taps();
  const int r = kWin / 2;
  Plane tmp(u.h, u.w), out(u.h, u.w);
  for (int y = 0; y < u.h; ++y)
    for (int xx = 0; xx < u.w; ++xx) {
      const double g = u.at(y, xx);
      if (g == 0.0) continue;
      for (int a = 0; a < kWin; ++a) tmp.at(reflect(y + a - r, u.h), xx) += k[static_cast<size_t>(a)] * g;
    }
  for (int y = 0; y < u.h; ++y)
    for (int xx = 0; xx < u.w; ++xx) {
      const double g = tmp.at(y, xx);
      if (g == 0.0) continue;
      for (int a = 0; a < kWin; ++a) out.at(y, reflect(xx + a - r, u.w)) += k[static_cast<size_t>(a)] * g;
    }
  return out;
}

Plane downsample2(const Plane& x) {
  Plane out(x.h / 2, x.w / 2);
  for (int y = 0; y < out.h; ++y)
    for (int xx = 0; xx < out.w; ++xx)
      out.at(y, xx) = 0.25 * (x.at(2 * y, 2 * xx) + x.at(2 * y + 1, 2 * xx) +
                              x.at(2 * y, 2 * xx + 1) + x.at(2 * y + 1, 2 * xx + 1));
  return out;
}

Plane downsample2_adjoint(const Plane& g, int h_in, int w_in) {
  Plane out(h_in, w_in);
  for (int y = 0; y < g.h; ++y)
    for (int xx = 0; xx < g.w; ++xx) {
      const double v = 0.25 * g.at(y, xx);
      out.at(2 * y, 2 * xx) += v;
      out.at(2 * y + 1, 2 * xx) += v;
      out.at(2 * y, 2 * xx + 1) += v;
      out.at(2 * y + 1, 2 * xx + 1) += v;
    }
  return out;
}

Plane mul(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct ScaleStats {
  // Everything needed for the backward pass at one scale of one channel.
  Plane x, y, mux, muy, sxx, syy, sxy;  // s** are raw second moments G(x*x) etc.
  double cs_sum = 0.0;
  double lum_sum = 0.0;
};

struct Accum {
  std::array<double, kScales> cs_mean{};  // over all channels and pixels
  double lum_mean = 0.0;
  std::vector<std::vector<ScaleStats>> stats;  // [channel][scale], kept for grad
};

void run_forward(const Tensor<double>& a, const Tensor<double>& b, bool keep_stats, Accum* acc) {
  check_arg(a.same_shape(b), "ms_ssim: shape mismatch");
  check_arg(a.rank() == 3, "ms_ssim: expected [H,W,C]");
  const int h = a.dim(0), w = a.dim(1), ch = a.dim(2);
  check_arg(std::min(h, w) >= kMinSide,
            "ms_ssim: image too small, need min(H,W) >= " + std::to_string(kMinSide));

  std::array<double, kScales> cs_total{};
  std::array<int64_t, kScales> cs_count{};
  double lum_total = 0.0;
  int64_t lum_count = 0;
  if (keep_stats) acc->stats.assign(static_cast<size_t>(ch), {});

  for (int c = 0; c < ch; ++c) {
    Plane x(h, w), y(h, w);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        x.at(i, j) = a[(static_cast<int64_t>(i) * w + j) * ch + c];
        y.at(i, j) = b[(static_cast<int64_t>(i) * w + j) * ch + c];
      }
    for (int s = 0; s < kScales; ++s) {
      ScaleStats st;
      st.mux = gauss(x);
      st.muy = gauss(y);
      st.sxx = gauss(mul(x, x));
      st.syy = gauss(mul(y, y));
      st.sxy = gauss(mul(x, y));
      const int64_t n = static_cast<int64_t>(x.h) * x.w;
      for (int64_t i = 0; i < n; ++i) {
        const double mx = st.mux.v[static_cast<size_t>(i)], my = st.muy.v[static_cast<size_t>(i)];
        const double vx = st.sxx.v[static_cast<size_t>(i)] - mx * mx;
        const double vy = st.syy.v[static_cast<size_t>(i)] - my * my;
        const double vxy = st.sxy.v[static_cast<size_t>(i)] - mx * my;
        st.cs_sum += (2.0 * vxy + kC2) / (vx + vy + kC2);
        if (s == kScales - 1) st.lum_sum += (2.0 * mx * my + kC1) / (mx * mx + my * my + kC1);
      }
      cs_total[static_cast<size_t>(s)] += st.cs_sum;
      cs_count[static_cast<size_t>(s)] += n;
      if (s == kScales - 1) {
        lum_total += st.lum_sum;
        lum_count += n;
      }
      Plane xn, yn;
      if (s + 1 < kScales) {
        xn = downsample2(x);
        yn = downsample2(y);
      }
      if (keep_stats) {
        st.x = std::move(x);
        st.y = std::move(y);
        acc->stats[static_cast<size_t>(c)].push_back(std::move(st));
      }
      if (s + 1 < kScales) {
        x = std::move(xn);
        y = std::move(yn);
      }
    }
  }
  for (int s = 0; s < kScales; ++s)
    acc->cs_mean[static_cast<size_t>(s)] =
        std::max(0.0, cs_total[static_cast<size_t>(s)] / static_cast<double>(cs_count[static_cast<size_t>(s)]));
  acc->lum_mean = std::max(0.0, lum_total / static_cast<double>(lum_count));
}

double combine(const Accum& acc) {
  double v = std::pow(acc.lum_mean, kWeights[kScales - 1]);
  for (int s = 0; s < kScales; ++s) v *= std::pow(acc.cs_mean[static_cast<size_t>(s)], kWeights[static_cast<size_t>(s)]);
  return v;
}

}  // namespace

double ms_ssim(const Tensor<double>& a, const Tensor<double>& b) {
  Accum acc;
  run_forward(a, b, false, &acc);
  return combine(acc);
}

double ms_ssim_with_grad(const Tensor<double>& a, const Tensor<double>& b,
                         Tensor<double>* grad_b) {
  Accum acc;
  run_forward(a, b, true, &acc);
  const double value = combine(acc);

  const int h = a.dim(0), w = a.dim(1), ch = a.dim(2);
  *grad_b = Tensor<double>(a.shape());
  if (value <= 0.0) return value;  // clamped scale: flat region, zero gradient

  // dV/d(mean cs_s) and dV/d(mean lum); means are over all channels jointly.
  std::array<double, kScales> dv_dcs{};
  for (int s = 0; s < kScales; ++s)
    dv_dcs[static_cast<size_t>(s)] = value * kWeights[static_cast<size_t>(s)] / acc.cs_mean[static_cast<size_t>(s)];
  const double dv_dlum = value * kWeights[kScales - 1] / acc.lum_mean;

  for (int c = 0; c < ch; ++c) {
    // Walk scales coarsest-to-finest, carrying the pooled-image gradient.
    Plane carry;  // gradient w.r.t. y-plane at current scale
    for (int s = kScales - 1; s >= 0; --s) {
      const ScaleStats& st = acc.stats[static_cast<size_t>(c)][static_cast<size_t>(s)];
      const int64_t n_ch = static_cast<int64_t>(st.x.h) * st.x.w;
      const int64_t n_all = n_ch * ch;
      const double u = dv_dcs[static_cast<size_t>(s)] / static_cast<double>(n_all);

      Plane w_sxy(st.x.h, st.x.w), w_syy(st.x.h, st.x.w), w_muy(st.x.h, st.x.w);
      for (int64_t i = 0; i < n_ch; ++i) {
        const double mx = st.mux.v[static_cast<size_t>(i)], my = st.muy.v[static_cast<size_t>(i)];
        const double vx = st.sxx.v[static_cast<size_t>(i)] - mx * mx;
        const double vy = st.syy.v[static_cast<size_t>(i)] - my * my;
        const double vxy = st.sxy.v[static_cast<size_t>(i)] - mx * my;
        const double den = vx + vy + kC2;
        const double num = 2.0 * vxy + kC2;
        // cs = num/den with num = 2(G(xy) - mux*muy) + C2, den = ... + C2
        w_sxy.v[static_cast<size_t>(i)] = u * 2.0 / den;
        w_syy.v[static_cast<size_t>(i)] = u * (-num / (den * den));
        w_muy.v[static_cast<size_t>(i)] =
            u * (-2.0 * mx / den + 2.0 * num * my / (den * den));
        if (s == kScales - 1) {
          const double lden = mx * mx + my * my + kC1;
          const double lnum = 2.0 * mx * my + kC1;
          const double ul = dv_dlum / static_cast<double>(n_all);
          w_muy.v[static_cast<size_t>(i)] +=
              ul * (2.0 * mx / lden - 2.0 * lnum * my / (lden * lden));
        }
      }
      Plane grad = gauss_adjoint(w_muy);
      {
        Plane gy2 = gauss_adjoint(w_syy);  // through G(y*y): += 2*y*adj
        Plane gxy = gauss_adjoint(w_sxy);  // through G(x*y): += x*adj
        for (int64_t i = 0; i < n_ch; ++i)
          grad.v[static_cast<size_t>(i)] += 2.0 * st.y.v[static_cast<size_t>(i)] * gy2.v[static_cast<size_t>(i)] +
                                            st.x.v[static_cast<size_t>(i)] * gxy.v[static_cast<size_t>(i)];
      }
      if (carry.h > 0) {
        Plane up = downsample2_adjoint(carry, st.x.h, st.x.w);
        for (size_t i = 0; i < grad.v.size(); ++i) grad.v[i] += up.v[i];
      }
      carry = std::move(grad);
    }
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        (*grad_b)[(static_cast<int64_t>(i) * w + j) * ch + c] = carry.at(i, j);
  }
  return value;
}

}  // namespace swjc
