// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: rate-distortion sweeps over (SNR, CBR) grids,
// effective-receptive-field maps, latency measurement. All randomness is
// derived from per-cell seeds so identical specs reproduce identical CSVs.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "swjc/dataset.hpp"
#include "swjc/metrics.hpp"
#include "swjc/model.hpp"
#include "swjc/rate_mask.hpp"
#include "swjc/report.hpp"

namespace swjc {

struct SweepSpec {
  std::vector<double> snr_grid;
  std::vector<double> rate_grid;
  ChannelKind channel = ChannelKind::Awgn;
  bool equalize = true;
  int n_rep = 10;
  uint64_t seed = 1;
  int eval_multiple = 128;
  bool want_psnr = true;
  bool want_msssim = true;
  int threads = 1;  // worker threads over grid cells; results are
                    // seed-deterministic regardless of the thread count
  std::string dataset_name = "dataset";
  std::filesystem::path out_dir;
};

struct SweepCell {
  double snr_db = 0.0;
  double cbr_requested = 0.0;
  double cbr_actual = 0.0;  // k/m, exact
  int64_t k = 0, m = 0;
  double mean_psnr = 0.0;
  double se_psnr = 0.0;  // standard error over noise realizations
  double mean_msssim_db = std::nan("");
  bool failed = false;
  std::string error;
  bool flagged_nonmonotone = false;  // PSNR drop > 0.1 dB vs the next-lower SNR
};

struct SweepResult {
  std::vector<SweepCell> cells;  // snr-major, rate-minor
  int snr_count = 0, rate_count = 0;

  const SweepCell& at(int si, int ri) const {
    return cells[static_cast<size_t>(si) * rate_count + ri];
  }
};

// Flags every cell whose mean PSNR drops by more than 0.1 dB against the
// next-lower SNR at the same rate (graceful-degradation report; reporting
// only, never a failure).
inline void flag_nonmonotone_cells(SweepResult& result) {
  for (int ri = 0; ri < result.rate_count; ++ri) {
    for (int si = 1; si < result.snr_count; ++si) {
      auto& prev = result.cells[static_cast<size_t>(si - 1) * result.rate_count + ri];
      auto& cur = result.cells[static_cast<size_t>(si) * result.rate_count + ri];
      if (!prev.failed && !cur.failed && cur.mean_psnr < prev.mean_psnr - 0.1)
        cur.flagged_nonmonotone = true;
    }
  }
}

// Full grid sweep; per-cell failures are recorded and the sweep continues.
// Cells are distributed over `spec.threads` workers; every cell derives its
// own generator from (seed, cell index), so the CSV is identical for any
// thread count.
template <typename S>
SweepResult rd_sweep(const Model<S>& model, const Dataset& data, const SweepSpec& spec) {
  check_arg(!spec.snr_grid.empty() && !spec.rate_grid.empty(), "sweep: empty grid");
  std::filesystem::create_directories(spec.out_dir);

  const int multiple = std::max(spec.eval_multiple, model.config().codec.input_multiple());
  const int stages = model.config().codec.stages();
  const int cs = model.config().codec.latent_width();

  struct Row {
    size_t image;
    double si_bits, si_syms;
    double cbr_actual;
    int64_t k, m;
    bool has_psnr = false, has_ms = false;
    double psnr_v = 0.0, ms_v = 0.0;
  };
  struct CellOut {
    SweepCell cell;
    std::vector<Row> rows;
  };

  SweepResult result;
  result.snr_count = static_cast<int>(spec.snr_grid.size());
  result.rate_count = static_cast<int>(spec.rate_grid.size());
  const size_t n_cells = spec.snr_grid.size() * spec.rate_grid.size();
  std::vector<CellOut> cells(n_cells);

  auto compute_cell = [&](size_t ci) {
    const size_t si = ci / spec.rate_grid.size();
    const size_t ri = ci % spec.rate_grid.size();
    const double snr = spec.snr_grid[si];
    const double cbr_req = spec.rate_grid[ri];
    CellOut& out = cells[ci];
    out.cell.snr_db = snr;
    out.cell.cbr_requested = cbr_req;
    const uint64_t cell_seed = Rng::mix(spec.seed, si * 1000003 + ri + 1);
    try {
      const int c_keep = model.config().has_rate_modnet() ? cbr_to_channels(cbr_req, stages, cs)
                                                          : model.fixed_channels();
      double psnr_sum = 0.0, psnr_sq = 0.0, ms_sum = 0.0;
      int64_t n_psnr = 0, n_ms = 0;
      for (size_t j = 0; j < data.size(); ++j) {
        auto view = data.eval_view(j, multiple);
        if (!view) continue;
        const Tensor<S> img = view->template cast<S>();
        const Tensor<double> img_d = to_double(img);
        Row row;
        row.image = j;
        const int64_t l = (static_cast<int64_t>(img.dim(0)) >> stages) *
                          (static_cast<int64_t>(img.dim(1)) >> stages);
        row.k = l * c_keep / 2;
        row.m = 3LL * img.dim(0) * img.dim(1);
        row.cbr_actual = static_cast<double>(row.k) / static_cast<double>(row.m);
        out.cell.k = row.k;
        out.cell.m = row.m;
        out.cell.cbr_actual = row.cbr_actual;
        row.si_bits = model.config().has_rate_modnet() ? static_cast<double>(cs) : 0.0;
        row.si_syms = row.si_bits > 0.0 ? side_info_symbols(row.si_bits, snr) : 0.0;

        double img_psnr = 0.0, img_ms = 0.0;
        int img_ms_n = 0;
        for (int r = 0; r < spec.n_rep; ++r) {
          const uint64_t rep_seed = Rng::mix(cell_seed, j * 131071 + static_cast<uint64_t>(r));
          Tensor<S> recon =
              model.transmit_image(img, snr, cbr_req, spec.channel, rep_seed, spec.equalize);
          const Tensor<double> recon_d = to_double(recon);
          if (spec.want_psnr) {
            const double v = psnr(img_d, recon_d);
            img_psnr += v;
            psnr_sum += v;
            psnr_sq += v * v;
            ++n_psnr;
          }
          if (spec.want_msssim && std::min(img.dim(0), img.dim(1)) >= 160) {
            const double v = ms_ssim_db(ms_ssim(img_d, recon_d));
            img_ms += v;
            ms_sum += v;
            ++n_ms;
            ++img_ms_n;
          }
        }
        if (spec.want_psnr) {
          row.has_psnr = true;
          row.psnr_v = img_psnr / spec.n_rep;
        }
        if (img_ms_n > 0) {
          row.has_ms = true;
          row.ms_v = img_ms / img_ms_n;
        }
        out.rows.push_back(row);
      }
      check_arg(n_psnr > 0 || n_ms > 0, "sweep: no evaluable images for this cell");
      if (n_psnr > 0) {
        out.cell.mean_psnr = psnr_sum / n_psnr;
        const double var = std::max(0.0, psnr_sq / n_psnr - out.cell.mean_psnr * out.cell.mean_psnr);
        out.cell.se_psnr = std::sqrt(var / n_psnr);
      }
      if (n_ms > 0) out.cell.mean_msssim_db = ms_sum / n_ms;
    } catch (const Error& e) {
      out.cell.failed = true;
      out.cell.error = e.what();
      out.rows.clear();
    }
  };

  const int n_workers = std::max(1, std::min<int>(spec.threads, static_cast<int>(n_cells)));
  if (n_workers == 1) {
    for (size_t ci = 0; ci < n_cells; ++ci) compute_cell(ci);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < n_workers; ++t)
      workers.emplace_back([&] {
        for (size_t ci = next.fetch_add(1); ci < n_cells; ci = next.fetch_add(1)) compute_cell(ci);
      });
    for (auto& w : workers) w.join();
  }

  CsvWriter points(spec.out_dir / "rd_points.csv");
  points.comment("side_info_symbols = side_info_bits / log2(1 + 10^(snr_db/10))");
  points.comment("cbr = k/m with m = 3*H*W; cbr_requested is the grid value");
  points.comment("seed=" + std::to_string(spec.seed) + " n_rep=" + std::to_string(spec.n_rep) +
                 " channel=" + channel_kind_name(spec.channel));
  points.header({"dataset", "image_id", "snr_db", "cbr", "cbr_requested", "k", "m",
                 "side_info_bits", "side_info_symbols", "metric", "value"});
  for (const CellOut& co : cells) {
    for (const Row& row : co.rows) {
      auto emit = [&](const std::string& metric, double value) {
        points.row({spec.dataset_name, data.id(row.image), CsvWriter::fmt(co.cell.snr_db),
                    CsvWriter::fmt(row.cbr_actual), CsvWriter::fmt(co.cell.cbr_requested),
                    CsvWriter::fmt(row.k), CsvWriter::fmt(row.m), CsvWriter::fmt(row.si_bits),
                    CsvWriter::fmt(row.si_syms), metric, CsvWriter::fmt(value)});
      };
      if (row.has_psnr) emit("psnr", row.psnr_v);
      if (row.has_ms) emit("msssim_db", row.ms_v);
    }
    result.cells.push_back(co.cell);
  }

  flag_nonmonotone_cells(result);

  CsvWriter cells_csv(spec.out_dir / "rd_cells.csv");
  cells_csv.comment("per-cell means over images and noise realizations");
  cells_csv.header({"snr_db", "cbr", "cbr_requested", "k", "m", "mean_psnr", "se_psnr",
                    "mean_msssim_db", "failed", "nonmonotone_flag"});
  for (const auto& c : result.cells)
    cells_csv.row({CsvWriter::fmt(c.snr_db), CsvWriter::fmt(c.cbr_actual),
                   CsvWriter::fmt(c.cbr_requested), CsvWriter::fmt(c.k), CsvWriter::fmt(c.m),
                   CsvWriter::fmt(c.mean_psnr), CsvWriter::fmt(c.se_psnr),
                   std::isnan(c.mean_msssim_db) ? "" : CsvWriter::fmt(c.mean_msssim_db),
                   c.failed ? "1" : "0", c.flagged_nonmonotone ? "1" : "0"});

  if (spec.want_psnr) {
    Tensor<double> grid({result.snr_count, result.rate_count});
    for (int si = 0; si < result.snr_count; ++si)
      for (int ri = 0; ri < result.rate_count; ++ri) grid[si * result.rate_count + ri] = result.at(si, ri).mean_psnr;
    write_heatmap_ppm(spec.out_dir / "surface_psnr.ppm", grid);
  }
  return result;
}

// |d(latent center channel-sum)/d(input)|, averaged over color channels and
// images. `encode_fn` maps (graph, image var, h, w) to a latent [l, C];
// `downsample` is the spatial reduction factor of that latent.
template <typename S, typename EncodeFn>
Tensor<double> erf_map(EncodeFn&& encode_fn, const std::vector<Tensor<S>>& images, int crop,
                       int downsample) {
  check_arg(!images.empty(), "erf: no images");
  check_arg(crop % downsample == 0, "erf: crop must be a multiple of the downsample factor");
  Tensor<double> acc({crop, crop});
  const int hl = crop / downsample, wl = crop / downsample;
  for (const auto& img : images) {
    check_arg(img.rank() == 3 && img.dim(0) >= crop && img.dim(1) >= crop,
              "erf: image smaller than crop");
    // center crop
    Tensor<S> view({crop, crop, 3});
    const int y0 = (img.dim(0) - crop) / 2, x0 = (img.dim(1) - crop) / 2;
    for (int y = 0; y < crop; ++y)
      for (int x = 0; x < crop; ++x)
        for (int c = 0; c < 3; ++c)
          view[(static_cast<int64_t>(y) * crop + x) * 3 + c] =
              img[(static_cast<int64_t>(y + y0) * img.dim(1) + (x + x0)) * 3 + c];
    Graph<S> g;
    Var<S> x = g.input(view, /*requires_grad=*/true);
    Var<S> latent = encode_fn(g, x, crop, crop);
    const int c_lat = latent->val().shape().back();
    check_arg(latent->val().size() == static_cast<int64_t>(hl) * wl * c_lat,
              "erf: latent size does not match the declared downsample");
    const int64_t center_row = (static_cast<int64_t>(hl) / 2) * wl + wl / 2;
    auto idx = std::make_shared<IndexMap>();
    for (int c = 0; c < c_lat; ++c) idx->push_back(center_row * c_lat + c);
    Var<S> center = g.gather(latent, {c_lat}, idx);
    g.backward(g.reduce_sum(center));
    check_arg(x->has_grad, "erf: input received no gradient");
    for (int y = 0; y < crop; ++y)
      for (int x2 = 0; x2 < crop; ++x2) {
        double v = 0.0;
        for (int c = 0; c < 3; ++c)
          v += std::abs(static_cast<double>(x->grad[(static_cast<int64_t>(y) * crop + x2) * 3 + c]));
        acc[static_cast<int64_t>(y) * crop + x2] += v / 3.0;
      }
  }
  for (int64_t i = 0; i < acc.size(); ++i) acc[i] /= static_cast<double>(images.size());
  return acc;
}

struct LatencyReport {
  double encode_ms = 0.0;
  double decode_ms = 0.0;
  double end_to_end_ms = 0.0;
  int64_t param_count = 0;
  int images = 0;
  int repetitions = 0;
};

// Mean per-image encode/decode wall time at batch size 1.
template <typename S>
LatencyReport latency_bench(const Model<S>& model, const Dataset& data, int repetitions,
                            int eval_multiple, double snr_db, double cbr,
                            const std::filesystem::path& csv_path) {
  using Clock = std::chrono::steady_clock;
  LatencyReport rep;
  rep.repetitions = repetitions;
  rep.param_count = model.params().total_size();
  const int multiple = std::max(eval_multiple, model.config().codec.input_multiple());
  CsvWriter csv(csv_path);
  csv.comment("param_count=" + std::to_string(rep.param_count));
  csv.header({"image_id", "encode_ms", "decode_ms", "end_to_end_ms"});
  double enc_total = 0.0, dec_total = 0.0;
  for (size_t j = 0; j < data.size(); ++j) {
    auto view = data.eval_view(j, multiple);
    if (!view) continue;
    const Tensor<S> img = view->template cast<S>();
    double enc_ms = 0.0, dec_ms = 0.0;
    for (int r = 0; r < repetitions; ++r) {
      Graph<S> g(false);
      Var<S> x = g.input(img);
      const auto t0 = Clock::now();
      auto enc = model.encode(g, x, img.dim(0), img.dim(1), snr_db, cbr);
      const auto t1 = Clock::now();
      Var<S> rx = transmit_awgn(g, enc.symbols, snr_db, Rng::mix(17, j * 31 + static_cast<uint64_t>(r)));
      const auto t2 = Clock::now();
      model.decode(g, rx, enc.mask, snr_db, img.dim(0), img.dim(1));
      const auto t3 = Clock::now();
      enc_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
      dec_ms += std::chrono::duration<double, std::milli>(t3 - t2).count();
    }
    enc_ms /= repetitions;
    dec_ms /= repetitions;
    csv.row({data.id(j), CsvWriter::fmt(enc_ms), CsvWriter::fmt(dec_ms),
             CsvWriter::fmt(enc_ms + dec_ms)});
    enc_total += enc_ms;
    dec_total += dec_ms;
    ++rep.images;
  }
  check_arg(rep.images > 0, "latency: no evaluable images");
  rep.encode_ms = enc_total / rep.images;
  rep.decode_ms = dec_total / rep.images;
  rep.end_to_end_ms = rep.encode_ms + rep.decode_ms;
  return rep;
}

}  // namespace swjc
