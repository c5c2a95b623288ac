// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sbora/errors.hpp"

namespace sbora {

enum class Precision : std::uint32_t { f32 = 32, f64 = 64 };

template <typename T>
inline constexpr Precision precision_of = std::is_same_v<T, float> ? Precision::f32 : Precision::f64;

/// Row-major dense matrix. Weights (W0, A, B, delta W) and activations
/// (batch x features) share this type; activations may have zero rows.
template <typename T>
class Matrix {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>,
                "Matrix supports float and double only");

 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("Matrix: data length " + std::to_string(data_.size()) + " != " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const noexcept {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  /// Element-wise IEEE equality (so -0 == +0 and NaN != NaN).
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// A batch of row vectors: rows = batch, cols = features.
template <typename T>
using Activation = Matrix<T>;

std::string shape_string(std::size_t rows, std::size_t cols);

template <typename T>
std::string shape_string(const Matrix<T>& m) {
  return shape_string(m.rows(), m.cols());
}

}  // namespace sbora
