// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Image ingestion. Sources are directories of portable raster files
// (PPM/PGM, binary or ASCII). The train split emits random square crops;
// the eval split center-crops every image to the largest multiple of a
// configured alignment in each dimension.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swjc/rng.hpp"
#include "swjc/tensor.hpp"

namespace swjc {

// [H, W, 3] with values in [0,1]. Grayscale files are replicated to RGB.
using Image = Tensor<float>;

Image read_image(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& img);
// Single-channel map scaled so its maximum maps to white.
void write_pgm_normalized(const std::filesystem::path& path, const Tensor<double>& map);

// Sorted list of raster files under `dir`; throws when none are found.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

Image center_crop_to_multiple(const Image& img, int multiple);
Image random_crop(const Image& img, int size, Rng& rng);

// Eagerly loaded dataset; unreadable files are skipped with a warning on
// stderr, an empty result is an error.
class Dataset {
 public:
  static Dataset load_dir(const std::filesystem::path& dir);
  static Dataset from_images(std::vector<Image> images, std::vector<std::string> ids);

  size_t size() const { return images_.size(); }
  const Image& image(size_t i) const { return images_[i]; }
  const std::string& id(size_t i) const { return ids_[i]; }

  // Random `size`x`size` training crop from a random image.
  Image sample_crop(int size, Rng& rng) const;

  // Center-cropped eval view; empty when the image is smaller than the
  // alignment multiple.
  std::optional<Image> eval_view(size_t i, int multiple) const;

 private:
  std::vector<Image> images_;
  std::vector<std::string> ids_;
};

}  // namespace swjc
