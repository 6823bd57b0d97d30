// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/report.hpp"

#include <cmath>
#include <cstdio>

namespace swjc {

CsvWriter::CsvWriter(const std::filesystem::path& path) : f_(path, std::ios::trunc) {
  check_arg(f_.good(), "csv: cannot open " + path.string());
}

void CsvWriter::comment(const std::string& line) {
  check_arg(!header_written_, "csv: metadata must precede the header");
  f_ << "# " << line << "\n";
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  check_arg(!header_written_, "csv: header written twice");
  for (size_t i = 0; i < cols.size(); ++i) f_ << (i ? "," : "") << cols[i];
  f_ << "\n";
  header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  check_arg(header_written_, "csv: row before header");
  for (size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
  f_ << "\n";
}

std::string CsvWriter::fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_heatmap_ppm(const std::filesystem::path& path, const Tensor<double>& grid) {
  check_arg(grid.rank() == 2 && grid.size() > 0, "heatmap: expected non-empty [rows, cols]");
  double lo = grid[0], hi = grid[0];
  for (int64_t i = 0; i < grid.size(); ++i) {
    lo = std::min(lo, grid[i]);
    hi = std::max(hi, grid[i]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const int cell = 24;  // pixels per grid cell
  const int h = grid.dim(0) * cell, w = grid.dim(1) * cell;
  std::ofstream out(path, std::ios::binary);
  check_arg(out.good(), "heatmap: cannot write " + path.string());
  out << "P6\n" << w << " " << h << "\n255\n";
  std::string buf;
  buf.reserve(static_cast<size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = grid[static_cast<int64_t>(y / cell) * grid.dim(1) + x / cell];
      const double t = (v - lo) / span;
      // blue -> cyan -> yellow -> red ramp
      const double r = std::min(1.0, std::max(0.0, 2.0 * t - 0.5));
      const double g = std::min(1.0, std::max(0.0, 1.5 - std::abs(2.0 * t - 1.0) * 1.5 + 0.5));
      const double b = std::min(1.0, std::max(0.0, 1.5 - 2.0 * t));
      buf.push_back(static_cast<char>(std::lround(r * 255)));
      buf.push_back(static_cast<char>(std::lround(g * 255)));
      buf.push_back(static_cast<char>(std::lround(b * 255)));
    }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace swjc
