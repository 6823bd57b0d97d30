// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "swjc/channel.hpp"
#include "swjc/model.hpp"

using namespace swjc;

namespace {

Tensor<float> noise_image(int h, int w, uint64_t seed) {
  Tensor<float> img({h, w, 3});
  Rng rng(seed);
  for (int64_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(rng.uniform());
  return img;
}

ModelConfig small_config() {
  ModelConfig mc;
  mc.codec.depths = {2, 4};
  mc.codec.widths = {128, 256};
  mc.codec.window = 2;
  mc.variant = Variant::Sa;
  mc.fixed_cbr = 1.0 / 3.0;
  return mc;
}

void BM_SwinBlockPairForward(benchmark::State& state) {
  const int hw = static_cast<int>(state.range(0));
  ParamStore<float> ps;
  SwinBlockPair<float> pair(ps, "pair", 128, 8, 4);
  Rng rng(1);
  pair.init(rng);
  Tensor<float> x({hw * hw, 128});
  x.fill_normal(rng, 1.0);
  for (auto _ : state) {
    Graph<float> g(false);
    benchmark::DoNotOptimize(pair.apply(g, g.input(x), hw, hw));
  }
  state.SetItemsProcessed(state.iterations() * hw * hw);
}
BENCHMARK(BM_SwinBlockPairForward)->Arg(32)->Arg(64);

void BM_EncodeLowRes(benchmark::State& state) {
  Model<float> model(small_config(), 1);
  Tensor<float> img = noise_image(32, 32, 2);
  for (auto _ : state) {
    Graph<float> g(false);
    auto enc = model.encode(g, g.input(img), 32, 32, 10.0, 1.0 / 3.0);
    benchmark::DoNotOptimize(enc.k);
  }
}
BENCHMARK(BM_EncodeLowRes);

void BM_EndToEndLowRes(benchmark::State& state) {
  Model<float> model(small_config(), 1);
  Tensor<float> img = noise_image(32, 32, 2);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.transmit_image(img, 10.0, 1.0 / 3.0, ChannelKind::Awgn, seed++));
  }
}
BENCHMARK(BM_EndToEndLowRes);

void BM_PowerNormalize(benchmark::State& state) {
  Rng rng(3);
  Tensor<float> x({1 << 16});
  x.fill_normal(rng, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_normalize_tensor(x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_PowerNormalize);

void BM_AwgnTransmit(benchmark::State& state) {
  Rng rng(4);
  Tensor<float> y({1 << 16});
  y.fill_normal(rng, 1.0);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmit_awgn_tensor(y, 10.0, seed++));
  }
  state.SetItemsProcessed(state.iterations() * y.size());
}
BENCHMARK(BM_AwgnTransmit);

}  // namespace

BENCHMARK_MAIN();
