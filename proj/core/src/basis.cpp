// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/basis.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sbora/rng.hpp"

namespace sbora {

BasisIndexSet::BasisIndexSet(std::uint32_t dim, std::vector<std::uint32_t> indices)
    : dim_(dim), indices_(std::move(indices)) {
  if (dim_ == 0) throw DimensionError("BasisIndexSet: dim must be positive");
  if (indices_.empty() || indices_.size() > dim_) {
    throw InvalidRankError("invalid rank " + std::to_string(indices_.size()) + " for dim " +
                           std::to_string(dim_) + " (need 1 <= r <= dim)");
  }
  for (std::size_t p = 0; p < indices_.size(); ++p) {
    if (indices_[p] >= dim_) {
      throw DimensionError("BasisIndexSet: index " + std::to_string(indices_[p]) +
                           " out of range for dim " + std::to_string(dim_));
    }
    if (p > 0 && indices_[p] <= indices_[p - 1]) {
      throw DimensionError("BasisIndexSet: indices must be strictly increasing");
    }
  }
}

bool BasisIndexSet::contains(std::uint32_t index) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

BasisIndexSet sample_basis_indices(std::uint32_t dim, std::uint32_t r, std::uint64_t seed) {
  if (r == 0 || r > dim) {
    throw InvalidRankError("invalid rank " + std::to_string(r) + " for dim " + std::to_string(dim) +
                           " (need 1 <= r <= dim)");
  }
  // Partial Fisher-Yates: the first r slots are a uniform r-subset.
  std::vector<std::uint32_t> pool(dim);
  std::iota(pool.begin(), pool.end(), 0u);
  Rng rng(seed);
  for (std::uint32_t i = 0; i < r; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(dim - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(r);
  std::sort(pool.begin(), pool.end());
  return BasisIndexSet(dim, std::move(pool));
}

template <typename T>
Matrix<T> materialize_basis(const BasisIndexSet& basis, BasisSide side) {
  const std::size_t r = basis.rank();
  const std::size_t dim = basis.dim();
  if (side == BasisSide::row) {
    Matrix<T> m(r, dim);
    for (std::size_t p = 0; p < r; ++p) m(p, basis[p]) = T(1);
    return m;
  }
  Matrix<T> m(dim, r);
  for (std::size_t p = 0; p < r; ++p) m(basis[p], p) = T(1);
  return m;
}

bool orthogonality_check(const BasisIndexSet& a, const BasisIndexSet& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("orthogonality_check: dims " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()) + " differ");
  }
  auto ia = a.indices();
  auto ib = b.indices();
  std::size_t i = 0, j = 0;
  while (i < ia.size() && j < ib.size()) {
    if (ia[i] == ib[j]) return false;
    if (ia[i] < ib[j]) ++i; else ++j;
  }
  return true;
}

template Matrix<float> materialize_basis<float>(const BasisIndexSet&, BasisSide);
template Matrix<double> materialize_basis<double>(const BasisIndexSet&, BasisSide);

}  // namespace sbora
