// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbora/matrix.hpp"

namespace sbora {

/// Which way a basis set is laid out when materialized: as r rows of the
/// dim x dim identity (projection-down, r x dim) or as r columns
/// (projection-up, dim x r).
enum class BasisSide { row, column };

/// The r selected standard-basis indices standing in for a frozen one-hot
/// projection matrix. Indices are 0-based, unique and ascending.
class BasisIndexSet {
 public:
  /// Validates and takes ownership. Throws InvalidRankError for an empty set
  /// or more indices than dim, DimensionError for out-of-range or unsorted
  /// or repeated indices.
  BasisIndexSet(std::uint32_t dim, std::vector<std::uint32_t> indices);

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return indices_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::uint32_t operator[](std::size_t p) const noexcept { return indices_[p]; }

  bool contains(std::uint32_t index) const noexcept;

  friend bool operator==(const BasisIndexSet&, const BasisIndexSet&) = default;

 private:
  std::uint32_t dim_;
  std::vector<std::uint32_t> indices_;
};

/// Draw r distinct indices uniformly from [0, dim). Deterministic in seed.
BasisIndexSet sample_basis_indices(std::uint32_t dim, std::uint32_t r, std::uint64_t seed);

/// Dense 0/1 form of the basis: r x dim for BasisSide::row, dim x r for
/// BasisSide::column.
template <typename T>
Matrix<T> materialize_basis(const BasisIndexSet& basis, BasisSide side);

/// True iff the sets share no index, i.e. the row-materialized product
/// P * Q^T is the zero matrix. Throws DimensionError when dims differ.
bool orthogonality_check(const BasisIndexSet& a, const BasisIndexSet& b);

}  // namespace sbora
