// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bjontegaard delta rate with monotone piecewise-cubic (PCHIP)
// interpolation of log10(rate) over quality and exact per-segment
// integration of the Hermite cubics.

#include <algorithm>
#include <cmath>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/metrics.hpp"

namespace swjc {
namespace {

struct Curve {
  std::vector<double> q;     // quality, strictly increasing
  std::vector<double> logr;  // log10(rate)
  std::vector<double> slope; // PCHIP derivatives d(logr)/dq
};

// Fritsch-Carlson monotone derivative estimates.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // one-sided endpoint rule with monotonicity guard
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0)
      s = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
      s = 3.0 * d0;
    return s;
  };
  if (n == 2) {
    d[0] = d[1] = delta[0];
  } else {
    d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  return d;
}

Curve make_curve(std::vector<RdPoint> pts, const char* which) {
  check_arg(pts.size() >= 4, std::string("bd_rate: need at least 4 points per curve (") + which + ")");
  std::sort(pts.begin(), pts.end(), [](const RdPoint& a, const RdPoint& b) { return a.cbr < b.cbr; });
  Curve c;
  for (const auto& p : pts) {
    check_arg(p.cbr > 0.0, "bd_rate: rates must be positive");
    if (!c.q.empty())
      check_arg(p.value > c.q.back(),
                std::string("bd_rate: quality must increase strictly with rate (") + which + ")");
    c.q.push_back(p.value);
    c.logr.push_back(std::log10(p.cbr));
  }
  c.slope = pchip_slopes(c.q, c.logr);
  return c;
}

// Integral of the Hermite segment over normalized coordinates [s0, s1].
double hermite_integral(double y0, double y1, double d0, double d1, double h, double s0, double s1) {
  auto basis = [](double s, double& b00, double& b10, double& b01, double& b11) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    b00 = 0.5 * s4 - s3 + s;
    b10 = 0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2;
    b01 = -0.5 * s4 + s3;
    b11 = 0.25 * s4 - s3 / 3.0;
  };
  double a00, a10, a01, a11, b00, b10, b01, b11;
  basis(s0, a00, a10, a01, a11);
  basis(s1, b00, b10, b01, b11);
  return h * (y0 * (b00 - a00) + h * d0 * (b10 - a10) + y1 * (b01 - a01) + h * d1 * (b11 - a11));
}

double integrate(const Curve& c, double lo, double hi) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < c.q.size(); ++i) {
    const double a = c.q[i], b = c.q[i + 1];
    const double seg_lo = std::max(a, lo), seg_hi = std::min(b, hi);
    if (seg_hi <= seg_lo) continue;
    const double h = b - a;
    total += hermite_integral(c.logr[i], c.logr[i + 1], c.slope[i], c.slope[i + 1], h,
                              (seg_lo - a) / h, (seg_hi - a) / h);
  }
  return total;
}

}  // namespace

double bd_rate_percent(std::vector<RdPoint> curve_a, std::vector<RdPoint> curve_b) {
  const Curve a = make_curve(std::move(curve_a), "a");
  const Curve b = make_curve(std::move(curve_b), "b");
  const double lo = std::max(a.q.front(), b.q.front());
  const double hi = std::min(a.q.back(), b.q.back());
  if (!(hi > lo)) throw UndefinedResult("bd_rate: quality ranges do not overlap");
  const double avg_diff = (integrate(b, lo, hi) - integrate(a, lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

}  // namespace swjc
