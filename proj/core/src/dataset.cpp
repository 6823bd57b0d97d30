// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>

namespace swjc {

namespace fs = std::filesystem;

namespace {

// Skips whitespace and '#' comment lines between PNM header tokens.
int next_pnm_int(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  check_arg(c != EOF, "pnm: truncated header");
  int v = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  check_arg(any, "pnm: malformed header integer");
  return v;
}

}  // namespace

Image read_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  check_arg(in.good(), "cannot open image: " + path.string());
  char p = 0, kind = 0;
  in.get(p);
  in.get(kind);
  check_arg(p == 'P' && (kind == '2' || kind == '3' || kind == '5' || kind == '6'),
            "unsupported raster format (want PGM/PPM): " + path.string());
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  const int w = next_pnm_int(in);
  const int h = next_pnm_int(in);
  const int maxval = next_pnm_int(in);
  check_arg(w > 0 && h > 0 && maxval > 0 && maxval < 65536, "pnm: bad dimensions");
  const int nch = color ? 3 : 1;
  const int64_t count = static_cast<int64_t>(w) * h * nch;
  std::vector<int> raw(static_cast<size_t>(count));
  if (binary) {
    check_arg(maxval < 256, "pnm: 16-bit binary samples not supported");
    std::vector<unsigned char> buf(static_cast<size_t>(count));
    in.read(reinterpret_cast<char*>(buf.data()), count);
    check_arg(in.gcount() == count, "pnm: truncated pixel data in " + path.string());
    for (int64_t i = 0; i < count; ++i) raw[static_cast<size_t>(i)] = buf[static_cast<size_t>(i)];
  } else {
    for (int64_t i = 0; i < count; ++i) raw[static_cast<size_t>(i)] = next_pnm_int(in);
  }
  Image img({h, w, 3});
  const float scale = 1.0f / static_cast<float>(maxval);
  for (int64_t i = 0; i < static_cast<int64_t>(w) * h; ++i)
    for (int c = 0; c < 3; ++c)
      img[i * 3 + c] = static_cast<float>(raw[static_cast<size_t>(i * nch + (color ? c : 0))]) * scale;
  return img;
}

void write_ppm(const fs::path& path, const Image& img) {
  check_arg(img.rank() == 3 && img.dim(2) == 3, "write_ppm: expected [H,W,3]");
  std::ofstream out(path, std::ios::binary);
  check_arg(out.good(), "cannot write image: " + path.string());
  out << "P6\n" << img.dim(1) << " " << img.dim(0) << "\n255\n";
  std::vector<unsigned char> buf(static_cast<size_t>(img.size()));
  for (int64_t i = 0; i < img.size(); ++i) {
    const float v = std::min(1.0f, std::max(0.0f, img[i]));
    buf[static_cast<size_t>(i)] = static_cast<unsigned char>(std::lround(v * 255.0f));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void write_pgm_normalized(const fs::path& path, const Tensor<double>& map) {
  check_arg(map.rank() == 2, "write_pgm: expected [H,W]");
  double mx = 0.0;
  for (int64_t i = 0; i < map.size(); ++i) mx = std::max(mx, map[i]);
  if (mx <= 0.0) mx = 1.0;
  std::ofstream out(path, std::ios::binary);
  check_arg(out.good(), "cannot write image: " + path.string());
  out << "P5\n" << map.dim(1) << " " << map.dim(0) << "\n255\n";
  std::vector<unsigned char> buf(static_cast<size_t>(map.size()));
  for (int64_t i = 0; i < map.size(); ++i)
    buf[static_cast<size_t>(i)] =
        static_cast<unsigned char>(std::lround(std::min(1.0, std::max(0.0, map[i] / mx)) * 255.0));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<fs::path> list_images(const fs::path& dir) {
  check_arg(fs::is_directory(dir), "dataset: not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("dataset: no raster images in " + dir.string());
  return files;
}

Image center_crop_to_multiple(const Image& img, int multiple) {
  check_arg(multiple >= 1, "crop: multiple must be >= 1");
  const int h = img.dim(0) / multiple * multiple;
  const int w = img.dim(1) / multiple * multiple;
  check_arg(h > 0 && w > 0, "crop: image smaller than the alignment multiple");
  const int y0 = (img.dim(0) - h) / 2;
  const int x0 = (img.dim(1) - w) / 2;
  Image out({h, w, 3});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out[(static_cast<int64_t>(y) * w + x) * 3 + c] =
            img[(static_cast<int64_t>(y + y0) * img.dim(1) + (x + x0)) * 3 + c];
  return out;
}

Image random_crop(const Image& img, int size, Rng& rng) {
  check_arg(img.dim(0) >= size && img.dim(1) >= size, "crop: image smaller than crop size");
  const int y0 = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(img.dim(0) - size + 1)));
  const int x0 = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(img.dim(1) - size + 1)));
  Image out({size, size, 3});
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c)
        out[(static_cast<int64_t>(y) * size + x) * 3 + c] =
            img[(static_cast<int64_t>(y + y0) * img.dim(1) + (x + x0)) * 3 + c];
  return out;
}

Dataset Dataset::load_dir(const fs::path& dir) {
  Dataset ds;
  for (const auto& f : list_images(dir)) {
    try {
      ds.images_.push_back(read_image(f));
      ds.ids_.push_back(f.stem().string());
    } catch (const Error& e) {
      std::cerr << "warning: skipping " << f << ": " << e.what() << "\n";
    }
  }
  if (ds.images_.empty()) throw Error("dataset: no readable images in " + dir.string());
  return ds;
}

Dataset Dataset::from_images(std::vector<Image> images, std::vector<std::string> ids) {
  check_arg(!images.empty() && images.size() == ids.size(), "dataset: bad in-memory dataset");
  Dataset ds;
  ds.images_ = std::move(images);
  ds.ids_ = std::move(ids);
  return ds;
}

Image Dataset::sample_crop(int size, Rng& rng) const {
  const auto& img = images_[rng.uniform_index(images_.size())];
  return random_crop(img, size, rng);
}

std::optional<Image> Dataset::eval_view(size_t i, int multiple) const {
  const Image& img = images_[i];
  if (img.dim(0) < multiple || img.dim(1) < multiple) return std::nullopt;
  return center_crop_to_multiple(img, multiple);
}

}  // namespace swjc
