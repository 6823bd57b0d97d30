// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: train / eval / sweep / erf / bench / export.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "swjc/checkpoint.hpp"
#include "swjc/config.hpp"
#include "swjc/harness.hpp"
#include "swjc/model.hpp"
#include "swjc/training.hpp"

namespace fs = std::filesystem;
using namespace swjc;

namespace {

using Scalar = float;  // runtime precision; tests exercise double too

ChannelKind channel_from_name(const std::string& s) {
  if (s == "awgn") return ChannelKind::Awgn;
  if (s == "rayleigh-fast") return ChannelKind::RayleighFast;
  if (s == "rayleigh-block") return ChannelKind::RayleighBlock;
  throw InvalidArgument("unknown channel kind: " + s);
}

ModelConfig model_config_from_file(const ConfigFile& cf) {
  cf.restrict_keys("model",
                   {"variant", "size", "depths", "widths", "window", "fixed_cbr", "sm_hidden"});
  ModelConfig mc;
  mc.variant = variant_from_name(cf.get_or("model", "variant", "sa_ra"));
  // size presets name the stage-depth ablations; explicit depths win
  std::vector<int> preset = {2, 2, 6, 2};
  const std::string size = cf.get_or("model", "size", "B");
  if (size == "S")
    preset = {2, 2, 2, 2};
  else if (size == "B")
    preset = {2, 2, 6, 2};
  else if (size == "L")
    preset = {2, 2, 18, 2};
  else
    throw InvalidArgument("config: unknown model size '" + size + "' (want S, B or L)");
  mc.codec.depths = cf.get_ints("model", "depths", preset);
  mc.codec.widths = cf.get_ints("model", "widths", {128, 192, 256, 320});
  mc.codec.window = cf.get_int("model", "window", 8);
  mc.fixed_cbr = cf.get_double("model", "fixed_cbr", 0.0625);
  mc.sm_hidden = cf.get_int("model", "sm_hidden", 64);
  mc.codec.validate();
  return mc;
}

std::vector<TrainPhase> phases_from_file(const ConfigFile& cf) {
  std::vector<TrainPhase> phases;
  for (int i = 1;; ++i) {
    const std::string sec = "phase" + std::to_string(i);
    if (!cf.has_section(sec)) break;
    cf.restrict_keys(sec, {"steps", "lr", "batch", "rate_policy", "snr_policy", "trainable"});
    TrainPhase ph;
    ph.name = sec;
    ph.steps = cf.get_int(sec, "steps", 100);
    ph.lr = cf.get_double(sec, "lr", 1e-4);
    ph.batch = cf.get_int(sec, "batch", 8);
    ph.rate = RatePolicy::parse(cf.get_or(sec, "rate_policy", "fixed:0.125"));
    ph.snr = SnrPolicy::parse(cf.get_or(sec, "snr_policy", "fixed:13"));
    const std::string tr = cf.get_or(sec, "trainable", "all");
    if (tr == "all")
      ph.trainable = TrainPhase::Trainable::All;
    else if (tr == "all_except_modnets")
      ph.trainable = TrainPhase::Trainable::AllExceptModNets;
    else
      throw InvalidArgument("config: unknown trainable subset '" + tr + "'");
    phases.push_back(std::move(ph));
  }
  check_arg(!phases.empty(), "config: no [phaseN] sections");
  return phases;
}

std::unique_ptr<Model<Scalar>> model_from_checkpoint(const fs::path& path) {
  Checkpoint ck = Checkpoint::load(path);
  ModelConfig mc = ModelConfig::from_keyvals(ck.config_map());
  auto model = std::make_unique<Model<Scalar>>(mc, /*init_seed=*/0);
  load_checkpoint_params(ck, model->params());
  return model;
}

int cmd_train(const fs::path& config_path, const fs::path& dataset_dir, const fs::path& out_dir,
              uint64_t seed_override, bool has_seed) {
  const ConfigFile cf = ConfigFile::parse_file(config_path);
  cf.restrict_sections({"model", "data", "channel", "train"}, {"phase"});
  cf.restrict_keys("data", {"train_crop", "eval_multiple"});
  cf.restrict_keys("channel", {"kind", "equalize"});
  cf.restrict_keys("train", {"loss", "seed", "val_interval", "val_images"});

  ModelConfig mc = model_config_from_file(cf);
  std::vector<TrainPhase> phases = phases_from_file(cf);

  TrainOptions opt;
  opt.loss = loss_kind_from_name(cf.get_or("train", "loss", "mse"));
  opt.channel = channel_from_name(cf.get_or("channel", "kind", "awgn"));
  opt.equalize = cf.get_bool("channel", "equalize", true);
  opt.seed = has_seed ? seed_override : static_cast<uint64_t>(cf.get_int("train", "seed", 1));
  opt.crop = cf.get_int("data", "train_crop", 256);
  opt.val_interval = cf.get_int("train", "val_interval", 50);
  opt.val_images = cf.get_int("train", "val_images", 2);

  fs::create_directories(out_dir);
  opt.log_path = (out_dir / "train_log.csv").string();

  Dataset data = Dataset::load_dir(dataset_dir);
  Model<Scalar> model(mc, opt.seed);
  std::cout << "training: " << model.params().total_size() << " parameters, "
            << phases.size() << " phase(s)\n";
  TrainReport rep = run_training(model, phases, data, opt);
  std::cout << "trained " << rep.steps_run << " steps, final loss " << rep.final_loss << "\n";

  Checkpoint ck = make_checkpoint(model.params(), mc.to_keyvals());
  const fs::path ck_path = out_dir / "model.swjc";
  ck.save(ck_path);
  std::cout << "checkpoint: " << ck_path << "\n";
  return 0;
}

int cmd_eval(const fs::path& ck_path, const fs::path& dataset_dir, const fs::path& out_dir,
             double snr, double cbr, const std::string& channel, bool equalize, uint64_t seed,
             const std::string& metric, int eval_multiple, int n_rep) {
  auto model = model_from_checkpoint(ck_path);
  Dataset data = Dataset::load_dir(dataset_dir);
  SweepSpec spec;
  spec.snr_grid = {snr};
  spec.rate_grid = {cbr};
  spec.channel = channel_from_name(channel);
  spec.equalize = equalize;
  spec.seed = seed;
  spec.n_rep = n_rep;
  spec.eval_multiple = eval_multiple;
  spec.want_psnr = metric != "msssim";
  spec.want_msssim = metric != "psnr";
  spec.out_dir = out_dir;
  spec.dataset_name = dataset_dir.filename().string();
  SweepResult res = rd_sweep(*model, data, spec);
  const auto& cell = res.at(0, 0);
  if (cell.failed) {
    std::cerr << "eval failed: " << cell.error << "\n";
    return 1;
  }
  std::cout << "snr=" << snr << " dB cbr=" << cell.cbr_actual << " psnr=" << cell.mean_psnr
            << " dB";
  if (!std::isnan(cell.mean_msssim_db)) std::cout << " msssim_db=" << cell.mean_msssim_db;
  std::cout << "\n";
  return 0;
}

int cmd_sweep(const fs::path& ck_path, const fs::path& dataset_dir, const fs::path& out_dir,
              const std::string& snr_list, const std::string& cbr_list,
              const std::string& channel, bool equalize, uint64_t seed, const std::string& metric,
              int eval_multiple, int n_rep, int threads) {
  auto model = model_from_checkpoint(ck_path);
  Dataset data = Dataset::load_dir(dataset_dir);
  SweepSpec spec;
  spec.snr_grid = parse_double_list(snr_list);
  spec.rate_grid = parse_double_list(cbr_list);
  spec.channel = channel_from_name(channel);
  spec.equalize = equalize;
  spec.seed = seed;
  spec.n_rep = n_rep;
  spec.eval_multiple = eval_multiple;
  spec.threads = threads;
  spec.want_psnr = metric != "msssim";
  spec.want_msssim = metric != "psnr";
  spec.out_dir = out_dir;
  spec.dataset_name = dataset_dir.filename().string();
  SweepResult res = rd_sweep(*model, data, spec);
  int failed = 0, flagged = 0;
  for (const auto& c : res.cells) {
    failed += c.failed;
    flagged += c.flagged_nonmonotone;
  }
  std::cout << res.cells.size() << " cells, " << failed << " failed, " << flagged
            << " flagged non-monotone; results in " << out_dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_erf(const fs::path& ck_path, const fs::path& dataset_dir, const fs::path& out_dir,
            int crop, int conv_width, int conv_layers, uint64_t seed) {
  auto model = model_from_checkpoint(ck_path);
  Dataset data = Dataset::load_dir(dataset_dir);
  std::vector<Tensor<Scalar>> images;
  for (size_t i = 0; i < data.size(); ++i) {
    const Image& img = data.image(i);
    if (img.dim(0) >= crop && img.dim(1) >= crop) images.push_back(img.cast<Scalar>());
  }
  check_arg(!images.empty(), "erf: no image is large enough for the crop");
  fs::create_directories(out_dir);

  const int down = 1 << model->config().codec.stages();
  Tensor<double> attn_map = erf_map<Scalar>(
      [&](Graph<Scalar>& g, Var<Scalar> x, int h, int w) {
        return model->encoder().apply(g, x, h, w);
      },
      images, crop, down);
  write_pgm_normalized(out_dir / "erf_attention.pgm", attn_map);
  std::cout << "wrote " << (out_dir / "erf_attention.pgm") << "\n";

  if (conv_width > 0) {
    ParamStore<Scalar> ps;
    ConvBackbone<Scalar> conv(ps, "conv", conv_width, conv_layers, model->config().codec.stages());
    Rng rng(seed);
    conv.init(rng);
    Tensor<double> conv_map = erf_map<Scalar>(
        [&](Graph<Scalar>& g, Var<Scalar> x, int h, int w) { return conv.apply(g, x, h, w); },
        images, crop, down);
    write_pgm_normalized(out_dir / "erf_conv.pgm", conv_map);
    std::cout << "wrote " << (out_dir / "erf_conv.pgm") << "\n";
  }
  return 0;
}

int cmd_bench(const fs::path& ck_path, const fs::path& dataset_dir, const fs::path& out_dir,
              int reps, double snr, double cbr, int eval_multiple) {
  auto model = model_from_checkpoint(ck_path);
  Dataset data = Dataset::load_dir(dataset_dir);
  fs::create_directories(out_dir);
  LatencyReport rep =
      latency_bench(*model, data, reps, eval_multiple, snr, cbr, out_dir / "latency.csv");
  std::cout << "params=" << rep.param_count << " encode=" << rep.encode_ms
            << "ms decode=" << rep.decode_ms << "ms end_to_end=" << rep.end_to_end_ms << "ms over "
            << rep.images << " images x " << rep.repetitions << " reps\n";
  return 0;
}

int cmd_export(const fs::path& ck_path, const fs::path& out_dir) {
  Checkpoint ck = Checkpoint::load(ck_path);
  fs::create_directories(out_dir);
  {
    std::ofstream cfg(out_dir / "config.txt");
    for (const auto& [k, v] : ck.config) cfg << k << "=" << v << "\n";
  }
  CsvWriter csv(out_dir / "entries.csv");
  csv.header({"name", "dims", "dtype", "offset_bytes", "size_bytes"});
  for (const auto& e : ck.entries) {
    csv.row({e.name, join_ints(e.dims), "f32le", CsvWriter::fmt(static_cast<int64_t>(e.offset)),
             CsvWriter::fmt(static_cast<int64_t>(e.count() * 4))});
  }
  std::cout << "exported " << ck.entries.size() << " entries to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned joint source-channel coding laboratory for wireless image transmission"};
  app.require_subcommand(1);

  std::string config, checkpoint, dataset, out = "out", channel = "awgn", metric = "both";
  std::string snr_list = "13", cbr_list = "0.0625";
  double snr = 10.0, cbr = 0.0625;
  uint64_t seed = 1;
  bool seed_set = false;
  bool equalize = true;
  int eval_multiple = 128, n_rep = 10, reps = 10, crop = 512;
  int conv_width = 0, conv_layers = 2, threads = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_ck) {
    if (needs_ck) cmd->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
    cmd->add_option("--dataset", dataset, "image directory")->required();
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--seed", seed, "rng seed")->each([&](const std::string&) { seed_set = true; });
  };

  auto* train = app.add_subcommand("train", "run the phase schedule from a config file");
  train->add_option("--config", config, "training config")->required();
  add_common(train, false);

  auto* eval = app.add_subcommand("eval", "single-condition evaluation");
  add_common(eval, true);
  eval->add_option("--snr", snr, "channel SNR in dB");
  eval->add_option("--cbr", cbr, "channel bandwidth ratio");
  eval->add_option("--channel", channel, "awgn | rayleigh-fast | rayleigh-block");
  eval->add_option("--equalize", equalize, "MMSE-equalize faded symbols");
  eval->add_option("--metric", metric, "psnr | msssim | both");
  eval->add_option("--eval-multiple", eval_multiple, "center-crop alignment");
  eval->add_option("--nrep", n_rep, "noise realizations per image");

  auto* sweep = app.add_subcommand("sweep", "rate-distortion surface over an SNR x CBR grid");
  add_common(sweep, true);
  sweep->add_option("--snr", snr_list, "SNR grid, comma separated");
  sweep->add_option("--cbr", cbr_list, "CBR grid, comma separated");
  sweep->add_option("--channel", channel, "awgn | rayleigh-fast | rayleigh-block");
  sweep->add_option("--equalize", equalize, "MMSE-equalize faded symbols");
  sweep->add_option("--metric", metric, "psnr | msssim | both");
  sweep->add_option("--eval-multiple", eval_multiple, "center-crop alignment");
  sweep->add_option("--nrep", n_rep, "noise realizations per image");
  sweep->add_option("--threads", threads, "worker threads over grid cells");

  auto* erf = app.add_subcommand("erf", "effective receptive field maps");
  add_common(erf, true);
  erf->add_option("--crop", crop, "center crop size");
  erf->add_option("--conv-width", conv_width, "also emit a conv-baseline map of this width");
  erf->add_option("--conv-layers", conv_layers, "conv layers per stage");

  auto* bench = app.add_subcommand("bench", "encode/decode latency at batch size 1");
  add_common(bench, true);
  bench->add_option("--reps", reps, "trials per image");
  bench->add_option("--snr", snr, "channel SNR in dB");
  bench->add_option("--cbr", cbr, "channel bandwidth ratio");
  bench->add_option("--eval-multiple", eval_multiple, "center-crop alignment");

  auto* exp = app.add_subcommand("export", "dump checkpoint config and entry table");
  exp->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
  exp->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config, dataset, out, seed, seed_set);
    if (eval->parsed())
      return cmd_eval(checkpoint, dataset, out, snr, cbr, channel, equalize, seed, metric,
                      eval_multiple, n_rep);
    if (sweep->parsed())
      return cmd_sweep(checkpoint, dataset, out, snr_list, cbr_list, channel, equalize, seed,
                       metric, eval_multiple, n_rep, threads);
    if (erf->parsed()) return cmd_erf(checkpoint, dataset, out, crop, conv_width, conv_layers, seed);
    if (bench->parsed()) return cmd_bench(checkpoint, dataset, out, reps, snr, cbr, eval_multiple);
    if (exp->parsed()) return cmd_export(checkpoint, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
