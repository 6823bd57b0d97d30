// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/rng.hpp"

namespace swjc {

// Fixed 64-byte alignment keeps Eigen's kernel dispatch (and therefore
// floating-point summation order) identical across allocations, which makes
// seeded runs bit-reproducible.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(kAlign)));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t(kAlign)); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
  template <typename U>
  bool operator!=(const AlignedAllocator<U>&) const { return false; }
};

// Dense row-major tensor of small rank. Shapes are carried as plain
// vectors; the last dimension is contiguous.
template <typename S>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(count(shape_)), S(0));
  }

  Tensor(std::initializer_list<int> shape) : Tensor(std::vector<int>(shape)) {}

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, S v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  static Tensor from(std::vector<int> shape, const std::vector<S>& values) {
    Tensor t(std::move(shape));
    check_arg(static_cast<int64_t>(values.size()) == t.size(),
              "tensor: value count does not match shape");
    std::copy(values.begin(), values.end(), t.data_.begin());
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }
  S& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  S operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  void fill(S v) { std::fill(data_.begin(), data_.end(), v); }

  void set_zero() { fill(S(0)); }

  // Reinterpret with a new shape of identical element count.
  Tensor reshaped(std::vector<int> shape) const {
    check_arg(count(shape) == size(), "tensor: reshape changes element count");
    Tensor t = *this;
    t.shape_ = std::move(shape);
    return t;
  }

  template <typename T>
  Tensor<T> cast() const {
    Tensor<T> t(shape_);
    for (int64_t i = 0; i < size(); ++i) t[i] = static_cast<T>(data_[static_cast<size_t>(i)]);
    return t;
  }

  // 2-D Eigen views; the tensor must have exactly rows*cols elements.
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Eigen::Map<Mat> mat(int rows, int cols) {
    check_arg(static_cast<int64_t>(rows) * cols == size(), "tensor: bad matrix view");
    return Eigen::Map<Mat>(data(), rows, cols);
  }
  Eigen::Map<const Mat> mat(int rows, int cols) const {
    check_arg(static_cast<int64_t>(rows) * cols == size(), "tensor: bad matrix view");
    return Eigen::Map<const Mat>(data(), rows, cols);
  }

  // View of the trailing dimension: [prod(leading), last].
  Eigen::Map<Mat> rows_by_last() {
    check_arg(rank() >= 1, "tensor: rank 0");
    const int last = shape_.back();
    return mat(static_cast<int>(size() / last), last);
  }
  Eigen::Map<const Mat> rows_by_last() const {
    check_arg(rank() >= 1, "tensor: rank 0");
    const int last = shape_.back();
    return mat(static_cast<int>(size() / last), last);
  }

  Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>> vec() {
    return Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>>(data(), size());
  }
  Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>> vec() const {
    return Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>(data(), size());
  }

  void add_scaled(const Tensor& o, S scale) {
    check_arg(same_shape(o), "tensor: add_scaled shape mismatch");
    vec() += scale * o.vec();
  }

  void fill_truncated_normal(Rng& rng, double stddev) {
    for (auto& v : data_) v = static_cast<S>(rng.truncated_normal() * stddev);
  }

  void fill_normal(Rng& rng, double stddev) {
    for (auto& v : data_) v = static_cast<S>(rng.normal() * stddev);
  }

  void fill_uniform(Rng& rng, double lo, double hi) {
    for (auto& v : data_) v = static_cast<S>(rng.uniform(lo, hi));
  }

  static int64_t count(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
      check_arg(d >= 0, "tensor: negative dimension");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<S, AlignedAllocator<S>> data_;
};

}  // namespace swjc
