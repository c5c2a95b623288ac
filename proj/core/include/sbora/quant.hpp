// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sbora/adapter.hpp"

namespace sbora {

/// The 16-level NormalFloat table: 8 positive and 7 negative standard-normal
/// quantiles (taken from evenly spaced probabilities between 0.5 and
/// kNf4Offset), plus an exact zero, scaled so the extremes are -1 and +1.
/// Sorted ascending.
inline constexpr double kNf4Offset = 0.9677083;
inline constexpr std::uint8_t kNf4ZeroCode = 7;

const std::array<double, 16>& nf4_codebook();

/// Index of the codebook entry nearest to v (v in [-1, 1]); a value exactly
/// halfway between two entries maps to the lower index.
std::uint8_t nf4_encode(double v);

/// Blockwise NF4 form of a frozen weight. Blocks run over the row-major
/// flattening; the last block may be short. Codes are packed two per byte,
/// the even element in the low nibble.
class QuantizedMatrix {
 public:
  QuantizedMatrix(std::size_t rows, std::size_t cols, std::size_t block_size,
                  std::vector<float> absmax, std::vector<std::uint8_t> packed_codes);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t block_count() const noexcept { return absmax_.size(); }

  const std::vector<float>& absmax() const noexcept { return absmax_; }
  const std::vector<std::uint8_t>& packed_codes() const noexcept { return codes_; }
  std::uint8_t code(std::size_t flat_index) const noexcept {
    return (codes_[flat_index / 2] >> (4 * (flat_index % 2))) & 0xF;
  }

  friend bool operator==(const QuantizedMatrix&, const QuantizedMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t block_size_;
  std::vector<float> absmax_;
  std::vector<std::uint8_t> codes_;
};

inline constexpr std::size_t kDefaultBlockSize = 64;

/// Per block: scale = max |w| (stored as the nearest float not below it), each
/// weight -> nf4_encode(w / scale); an all-zero block gets scale 0 and the zero
/// code. Throws NumericError on non-finite input.
template <typename T>
QuantizedMatrix quantize(const Matrix<T>& w, std::size_t block_size = kDefaultBlockSize);

/// w_hat = codebook[code] * absmax[block]
template <typename T>
Matrix<T> dequantize(const QuantizedMatrix& q);

/// Largest gap between adjacent codebook entries; the per-entry roundtrip
/// error is bounded by absmax * max_gap / 2.
double nf4_max_gap();

/// forward() with W0 replaced by dequantize(q); adapter math at full precision.
template <typename T>
Activation<T> quantized_forward(const QuantizedMatrix& q, const AdapterLayer<T>& layer,
                                const Activation<T>& x);

/// dequantize(q) + scale * delta W, with the regional guarantee of merge().
template <typename T>
Matrix<T> quantized_merge(const QuantizedMatrix& q, const AdapterLayer<T>& layer);

// Quantized checkpoint, little-endian:
//   "SBQ4NF"  rows u32  cols u32  block_size u32
//   absmax    ceil(rows*cols / block_size) x f32
//   codes     ceil(rows*cols / 2) bytes, two codes per byte (even index low nibble)
void save_quantized(std::ostream& out, const QuantizedMatrix& q);
void save_quantized(const std::filesystem::path& path, const QuantizedMatrix& q);
QuantizedMatrix load_quantized(std::istream& in);
QuantizedMatrix load_quantized(const std::filesystem::path& path);

}  // namespace sbora
