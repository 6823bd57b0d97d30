// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/tensor.hpp"

namespace swjc {

// CSV with '#'-prefixed metadata lines, a header row, deterministic float
// formatting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void comment(const std::string& line);
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);

  static std::string fmt(double v);
  static std::string fmt(int64_t v) { return std::to_string(v); }

 private:
  std::ofstream f_;
  bool header_written_ = false;
};

// False-color heat map of a value grid (rows x cols), written as PPM.
void write_heatmap_ppm(const std::filesystem::path& path, const Tensor<double>& grid);

}  // namespace swjc
