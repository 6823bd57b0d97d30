// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "swjc/channel.hpp"
#include "test_util.hpp"

using namespace swjc;
using test::max_fd_error;
using test::random_tensor;
using test::weighted_sum;
using DGraph = Graph<double>;

TEST_CASE("power normalize: uniform vector, random vectors, degenerate input") {
  // all entries equal: every complex symbol has magnitude 1
  Tensor<double> uni = Tensor<double>::full({16}, 0.37);
  Tensor<double> y = power_normalize_tensor(uni);
  for (int64_t i = 0; i < y.size(); i += 2) {
    const double mag = std::sqrt(y[i] * y[i] + y[i + 1] * y[i + 1]);
    REQUIRE_THAT(mag, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(y[i], Catch::Matchers::WithinAbs(M_SQRT1_2, 1e-12));
  }

  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_index(500));
    Tensor<double> raw = random_tensor({2 * k}, rng, 3.0);
    Tensor<double> out = power_normalize_tensor(raw);
    double p = 0.0;
    for (int64_t i = 0; i < out.size(); ++i) p += out[i] * out[i];
    REQUIRE_THAT(p / k, Catch::Matchers::WithinAbs(1.0, 1e-9));
  }

  Tensor<double> zero({8});
  REQUIRE_THROWS_AS(power_normalize_tensor(zero), InvalidArgument);
}

TEST_CASE("snr to noise variance") {
  REQUIRE(snr_to_sigma2(0.0) == 1.0);
  REQUIRE_THAT(snr_to_sigma2(10.0), Catch::Matchers::WithinAbs(0.1, 1e-15));
  REQUIRE_THAT(snr_to_sigma2(13.0), Catch::Matchers::WithinAbs(0.05012, 1e-5));
  REQUIRE_THROWS_AS(snr_to_sigma2(std::nan("")), InvalidArgument);
}

TEST_CASE("awgn: noiseless limit, empirical snr, seeded determinism") {
  Rng rng(2);
  Tensor<double> y = power_normalize_tensor(random_tensor({2 * 1000}, rng));

  // vanishing noise: output equals input bit-for-bit
  Tensor<double> clean = transmit_awgn_tensor(y, 4000.0, 7);
  for (int64_t i = 0; i < y.size(); ++i) REQUIRE(clean[i] == y[i]);

  // empirical SNR within 0.05 dB of the target at k = 1e6
  const int k = 1000000;
  Tensor<double> big = power_normalize_tensor(random_tensor({2 * k}, rng));
  Tensor<double> rx = transmit_awgn_tensor(big, 10.0, 8);
  double sig = 0.0, noise = 0.0;
  for (int64_t i = 0; i < big.size(); ++i) {
    sig += big[i] * big[i];
    const double n = rx[i] - big[i];
    noise += n * n;
  }
  const double snr_emp = 10.0 * std::log10(sig / noise);
  REQUIRE_THAT(snr_emp, Catch::Matchers::WithinAbs(10.0, 0.05));

  // identical (input, seed) -> identical output
  Tensor<double> a = transmit_awgn_tensor(y, 3.0, 42);
  Tensor<double> b = transmit_awgn_tensor(y, 3.0, 42);
  Tensor<double> c = transmit_awgn_tensor(y, 3.0, 43);
  bool any_diff = false;
  for (int64_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i] == b[i]);
    any_diff = any_diff || a[i] != c[i];
  }
  REQUIRE(any_diff);
}

TEST_CASE("awgn: gradient treats noise as a constant") {
  Rng rng(3);
  Tensor<double> x = random_tensor({12}, rng);
  Tensor<double> probe = random_tensor({12}, rng);
  auto eval = [&] {
    DGraph g;
    auto y = g.power_normalize(g.input(x, true));
    return weighted_sum(g, transmit_awgn(g, y, 5.0, 99), probe)->val()[0];
  };
  DGraph g;
  auto vx = g.input(x, true);
  g.backward(weighted_sum(g, transmit_awgn(g, g.power_normalize(vx), 5.0, 99), probe));
  REQUIRE(max_fd_error(eval, x, vx->grad) < 1e-7);
}

TEST_CASE("fading: degenerate all-ones taps reduce to awgn") {
  Rng rng(4);
  Tensor<double> y = power_normalize_tensor(random_tensor({64}, rng));
  auto ones = std::make_shared<Tensor<double>>(Tensor<double>({64}));
  for (int64_t i = 0; i < 64; i += 2) (*ones)[i] = 1.0;
  DGraph g(false);
  auto faded = g.complex_scale(g.input(y), ones);
  for (int64_t i = 0; i < y.size(); ++i)
    REQUIRE_THAT(faded->val()[i], Catch::Matchers::WithinAbs(y[i], 1e-15));
}

TEST_CASE("fading: fast taps have unit mean power, block shares one tap") {
  Rng rng(5);
  const int k = 1000000;
  Tensor<double> y = power_normalize_tensor(random_tensor({2 * k}, rng));
  DGraph g(false);
  ChannelRealization<double> real;
  transmit_fading(g, g.input(y), 10.0, ChannelKind::RayleighFast, 11, &real);
  REQUIRE(real.symbol_count() == k);
  double hp = 0.0;
  for (int64_t i = 0; i < real.h->size(); i += 2)
    hp += (*real.h)[i] * (*real.h)[i] + (*real.h)[i + 1] * (*real.h)[i + 1];
  REQUIRE_THAT(hp / k, Catch::Matchers::WithinAbs(1.0, 1e-2));

  DGraph g2(false);
  ChannelRealization<double> blk;
  transmit_fading(g2, g2.input(y), 10.0, ChannelKind::RayleighBlock, 12, &blk);
  for (int64_t i = 2; i < blk.h->size(); i += 2) {
    REQUIRE((*blk.h)[i] == (*blk.h)[0]);
    REQUIRE((*blk.h)[i + 1] == (*blk.h)[1]);
  }
}

TEST_CASE("equalize: zero-forcing limit, unit-tap closed form, mmse gain") {
  Rng rng(6);
  Tensor<double> y = power_normalize_tensor(random_tensor({2 * 50000}, rng));

  // sigma2 ~ 0: perfect recovery through conj(h)/|h|^2
  {
    DGraph g(false);
    ChannelRealization<double> real;
    auto rx = transmit_fading(g, g.input(y), 4000.0, ChannelKind::RayleighFast, 13, &real);
    auto eq = equalize(g, rx, real);
    for (int64_t i = 0; i < y.size(); ++i)
      REQUIRE_THAT(eq->val()[i], Catch::Matchers::WithinAbs(y[i], 1e-9));
  }

  // h == 1: equalizer is a pure scale by 1/(1 + sigma2)
  {
    DGraph g(false);
    ChannelRealization<double> real;
    real.kind = ChannelKind::RayleighBlock;
    real.sigma2 = 0.25;
    real.h = std::make_shared<Tensor<double>>(Tensor<double>({8}));
    for (int64_t i = 0; i < 8; i += 2) (*real.h)[i] = 1.0;
    Tensor<double> v = random_tensor({8}, rng);
    auto eq = equalize(g, g.input(v), real);
    for (int64_t i = 0; i < v.size(); ++i)
      REQUIRE_THAT(eq->val()[i], Catch::Matchers::WithinAbs(v[i] / 1.25, 1e-12));
  }

  // MMSE beats the raw faded observation in mean squared error
  {
    DGraph g(false);
    ChannelRealization<double> real;
    auto rx = transmit_fading(g, g.input(y), 5.0, ChannelKind::RayleighFast, 14, &real);
    auto eq = equalize(g, rx, real);
    double mse_raw = 0.0, mse_eq = 0.0;
    for (int64_t i = 0; i < y.size(); ++i) {
      mse_raw += (rx->val()[i] - y[i]) * (rx->val()[i] - y[i]);
      mse_eq += (eq->val()[i] - y[i]) * (eq->val()[i] - y[i]);
    }
    REQUIRE(mse_eq < mse_raw);
  }

  // CSI length mismatch is rejected
  {
    DGraph g(false);
    ChannelRealization<double> real;
    real.h = std::make_shared<Tensor<double>>(Tensor<double>({6}));
    real.sigma2 = 0.1;
    Tensor<double> v = random_tensor({8}, rng);
    REQUIRE_THROWS_AS(equalize(g, g.input(v), real), InvalidArgument);
  }
}

TEST_CASE("fading gradients flow through the taps") {
  Rng rng(7);
  Tensor<double> x = random_tensor({12}, rng);
  Tensor<double> probe = random_tensor({12}, rng);
  auto eval = [&] {
    DGraph g;
    auto y = g.power_normalize(g.input(x, true));
    return weighted_sum(g, transmit(g, y, ChannelKind::RayleighFast, 6.0, 21, true), probe)
        ->val()[0];
  };
  DGraph g;
  auto vx = g.input(x, true);
  g.backward(weighted_sum(
      g, transmit(g, g.power_normalize(vx), ChannelKind::RayleighFast, 6.0, 21, true), probe));
  REQUIRE(max_fd_error(eval, x, vx->grad) < 1e-7);
}
