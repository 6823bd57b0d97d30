// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Phase-based training: per-sample (SNR, rate) condition sampling, the
// end-to-end noisy-chain loss, Adam updates with global-norm clipping and
// an optional CSV log. Phases run in order against one optimizer whose
// state carries over.

#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "swjc/config.hpp"
#include "swjc/dataset.hpp"
#include "swjc/metrics.hpp"
#include "swjc/model.hpp"

namespace swjc {

// Numeric token that may be a plain value or a fraction like "1/3".
inline std::vector<double> parse_fraction_list(const std::string& s) {
  return parse_double_list(s);
}
inline double parse_fraction(const std::string& s) { return parse_double_list(s).front(); }

enum class LossKind { Mse, OneMinusMsssim };

inline LossKind loss_kind_from_name(const std::string& s) {
  if (s == "mse") return LossKind::Mse;
  if (s == "msssim") return LossKind::OneMinusMsssim;
  throw InvalidArgument("unknown loss kind: " + s);
}

struct RatePolicy {
  enum class Kind { Fixed, Grid };
  Kind kind = Kind::Fixed;
  double fixed = 0.125;
  std::vector<double> grid;

  // "fixed:0.125" or "grid:0.0208,0.0417,..."
  static RatePolicy parse(const std::string& s);
};

struct SnrPolicy {
  enum class Kind { Fixed, Grid, Uniform };
  Kind kind = Kind::Fixed;
  double fixed = 13.0;
  std::vector<double> grid;
  double lo = 1.0, hi = 13.0;

  // "fixed:13", "grid:1,4,7,10,13" or "uniform:1,13"
  static SnrPolicy parse(const std::string& s);
};

struct TrainPhase {
  std::string name = "phase";
  RatePolicy rate;
  SnrPolicy snr;
  int steps = 100;
  double lr = 1e-4;
  int batch = 8;
  enum class Trainable { All, AllExceptModNets };
  Trainable trainable = Trainable::All;
};

struct Condition {
  double snr_db = 13.0;
  double cbr = 0.125;
};

Condition sample_condition(const TrainPhase& phase, Rng& rng);

struct TrainOptions {
  LossKind loss = LossKind::Mse;
  ChannelKind channel = ChannelKind::Awgn;
  bool equalize = true;
  uint64_t seed = 1;
  int crop = 256;   // training crop; clamped to the source image size
  double clip_norm = 1.0;
  int val_interval = 0;  // emit a validation row every N steps (0 = off)
  int val_images = 2;
  std::string log_path;  // CSV training log, empty = none
};

struct TrainReport {
  int steps_run = 0;
  double final_loss = 0.0;
  std::vector<double> phase_final_loss;
  std::vector<double> loss_history;  // batch loss per global step
};

inline RatePolicy RatePolicy::parse(const std::string& s) {
  RatePolicy p;
  const size_t colon = s.find(':');
  check_arg(colon != std::string::npos, "rate policy: expected kind:args, got '" + s + "'");
  const std::string kind = s.substr(0, colon), args = s.substr(colon + 1);
  if (kind == "fixed") {
    p.kind = Kind::Fixed;
    p.fixed = parse_fraction(args);
  } else if (kind == "grid") {
    p.kind = Kind::Grid;
    p.grid = parse_fraction_list(args);
  } else {
    throw InvalidArgument("rate policy: unknown kind '" + kind + "'");
  }
  return p;
}

inline SnrPolicy SnrPolicy::parse(const std::string& s) {
  SnrPolicy p;
  const size_t colon = s.find(':');
  check_arg(colon != std::string::npos, "snr policy: expected kind:args, got '" + s + "'");
  const std::string kind = s.substr(0, colon), args = s.substr(colon + 1);
  if (kind == "fixed") {
    p.kind = Kind::Fixed;
    p.fixed = parse_fraction(args);
  } else if (kind == "grid") {
    p.kind = Kind::Grid;
    p.grid = parse_fraction_list(args);
  } else if (kind == "uniform") {
    auto v = parse_fraction_list(args);
    check_arg(v.size() == 2 && v[0] < v[1], "snr policy: uniform needs lo,hi");
    p.kind = Kind::Uniform;
    p.lo = v[0];
    p.hi = v[1];
  } else {
    throw InvalidArgument("snr policy: unknown kind '" + kind + "'");
  }
  return p;
}

inline Condition sample_condition(const TrainPhase& phase, Rng& rng) {
  Condition c;
  switch (phase.snr.kind) {
    case SnrPolicy::Kind::Fixed: c.snr_db = phase.snr.fixed; break;
    case SnrPolicy::Kind::Grid:
      c.snr_db = phase.snr.grid[rng.uniform_index(phase.snr.grid.size())];
      break;
    case SnrPolicy::Kind::Uniform: c.snr_db = rng.uniform(phase.snr.lo, phase.snr.hi); break;
  }
  switch (phase.rate.kind) {
    case RatePolicy::Kind::Fixed: c.cbr = phase.rate.fixed; break;
    case RatePolicy::Kind::Grid:
      c.cbr = phase.rate.grid[rng.uniform_index(phase.rate.grid.size())];
      break;
  }
  return c;
}

// Distortion between two images, differentiable w.r.t. the reconstruction
// node. MSE is the plain pixel mean; the perceptual mode is 1 - MS-SSIM
// with its analytic gradient.
template <typename S>
Var<S> image_loss(Graph<S>& g, Var<S> recon, const Tensor<S>& target, LossKind kind) {
  check_arg(recon->val().same_shape(target), "loss: shape mismatch");
  if (kind == LossKind::Mse) return g.mse_against(recon, target);
  const Tensor<double> td = to_double(target);
  const Tensor<double> rd = to_double(recon->val());
  Tensor<double> grad_d;
  const double v = ms_ssim_with_grad(td, rd, &grad_d);
  Tensor<S> value({1});
  value[0] = static_cast<S>(1.0 - v);
  auto grad = std::make_shared<Tensor<S>>(grad_d.template cast<S>());
  return g.custom(std::move(value), {recon},
                  [recon, grad](Graph<S>&, typename Graph<S>::Node& self) {
                    if (recon->requires_grad)
                      recon->grad_buf().add_scaled(*grad, -self.grad[0]);
                  });
}

template <typename S>
double validation_psnr(Model<S>& model, const Dataset& data, const TrainPhase& phase,
                       const TrainOptions& opt);

template <typename S>
TrainReport run_training(Model<S>& model, const std::vector<TrainPhase>& phases,
                         const Dataset& data, const TrainOptions& opt) {
  check_arg(!phases.empty(), "training: no phases");
  for (const auto& ph : phases)
    check_arg(ph.lr > 0.0 && ph.batch >= 1 && ph.steps >= 0, "training: bad phase config");

  int crop = opt.crop;
  for (size_t i = 0; i < data.size(); ++i)
    crop = std::min({crop, data.image(i).dim(0), data.image(i).dim(1)});
  const int multiple = model.config().codec.input_multiple();
  check_arg(crop % multiple == 0, "training: crop " + std::to_string(crop) +
                                      " is not a multiple of the model's input alignment " +
                                      std::to_string(multiple));

  Adam<S> adam(model.params().all(), phases.front().lr);
  std::ofstream log;
  if (!opt.log_path.empty()) {
    log.open(opt.log_path, std::ios::trunc);
    check_arg(log.good(), "training: cannot open log " + opt.log_path);
    log << "step,phase,loss,val_psnr\n";
  }

  TrainReport report;
  int global_step = 0;
  for (size_t pi = 0; pi < phases.size(); ++pi) {
    const TrainPhase& phase = phases[pi];
    adam.set_lr(phase.lr);
    std::vector<uint8_t> trainable;
    for (const auto* p : model.params().all()) {
      const bool frozen = phase.trainable == TrainPhase::Trainable::AllExceptModNets &&
                          Model<S>::is_modnet_param(p->name);
      trainable.push_back(frozen ? 0 : 1);
    }

    double smoothed = 0.0;
    for (int step = 0; step < phase.steps; ++step, ++global_step) {
      model.params().zero_grads();
      double batch_loss = 0.0;
      for (int b = 0; b < phase.batch; ++b) {
        Rng rng(Rng::mix(opt.seed, Rng::mix(static_cast<uint64_t>(global_step) + 1,
                                            static_cast<uint64_t>(b) + 0x51ed270b
                                            )));
        const Condition cond = sample_condition(phase, rng);
        Tensor<S> img = data.sample_crop(crop, rng).template cast<S>();
        Graph<S> g;
        Var<S> x = g.input(img);
        auto chain = model.forward_chain(g, x, crop, crop, cond.snr_db, cond.cbr, opt.channel,
                                         rng.next_u64(), opt.equalize);
        Var<S> loss = image_loss(g, chain.dec.image_unclamped, img, opt.loss);
        g.backward(loss);
        g.collect_param_grads(static_cast<S>(1.0 / phase.batch));
        batch_loss += static_cast<double>(loss->val()[0]) / phase.batch;
      }
      if (!std::isfinite(batch_loss))
        throw Error("training diverged: non-finite loss at step " + std::to_string(global_step));
      adam.clip_global_norm(opt.clip_norm, trainable);
      adam.step(trainable);
      smoothed = step == 0 ? batch_loss : 0.9 * smoothed + 0.1 * batch_loss;
      report.final_loss = batch_loss;
      report.loss_history.push_back(batch_loss);

      if (log.is_open()) {
        const bool val_now = opt.val_interval > 0 && (global_step + 1) % opt.val_interval == 0;
        double val_psnr = std::nan("");
        if (val_now) val_psnr = validation_psnr(model, data, phase, opt);
        log << global_step << "," << phase.name << "," << batch_loss << ","
            << (std::isnan(val_psnr) ? "" : std::to_string(val_psnr)) << "\n";
      }
      ++report.steps_run;
    }
    report.phase_final_loss.push_back(report.final_loss);
  }
  return report;
}

// Mean PSNR over the first few dataset images at the phase's nominal
// condition; deterministic noise per (image index).
template <typename S>
double validation_psnr(Model<S>& model, const Dataset& data, const TrainPhase& phase,
                       const TrainOptions& opt) {
  const double snr = phase.snr.kind == SnrPolicy::Kind::Fixed ? phase.snr.fixed : 13.0;
  const double cbr = phase.rate.kind == RatePolicy::Kind::Fixed ? phase.rate.fixed
                                                                : phase.rate.grid.back();
  const int n = std::min<int>(opt.val_images, static_cast<int>(data.size()));
  const int multiple = model.config().codec.input_multiple();
  double sum = 0.0;
  int used = 0;
  for (int i = 0; i < n; ++i) {
    auto view = data.eval_view(static_cast<size_t>(i), multiple);
    if (!view) continue;
    Tensor<S> img = view->template cast<S>();
    Tensor<S> recon = model.transmit_image(img, snr, cbr, opt.channel,
                                           Rng::mix(opt.seed, 0xa111 + static_cast<uint64_t>(i)),
                                           opt.equalize);
    sum += psnr(to_double(img), to_double(recon));
    ++used;
  }
  return used > 0 ? sum / used : std::nan("");
}

}  // namespace swjc
