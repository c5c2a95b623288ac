// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sbora/adapter.hpp"

namespace sbora {

/// A frozen base shared by several adapters, each with its own mixing weight:
/// Linear(x) = W0 x + sum_i lambda_i * adapter_i(x).
template <typename T>
struct WeightedAdapter {
  AdapterLayer<T> layer;
  T lambda = T(1);
};

template <typename T>
class CombinedModel {
 public:
  /// Throws DimensionError when an adapter's shape differs from w0 and
  /// OrthogonalityError when two standard-basis adapters on the same side
  /// share an index.
  CombinedModel(std::shared_ptr<const Matrix<T>> w0, std::vector<WeightedAdapter<T>> adapters);

  const Matrix<T>& w0() const noexcept { return *w0_; }
  const std::vector<WeightedAdapter<T>>& adapters() const noexcept { return adapters_; }

 private:
  std::shared_ptr<const Matrix<T>> w0_;
  std::vector<WeightedAdapter<T>> adapters_;
};

/// Throws OrthogonalityError naming the first overlapping pair of
/// same-side standard-basis adapters. LoRA adapters are not constrained.
template <typename T>
void require_disjoint(const std::vector<WeightedAdapter<T>>& adapters);

/// h = W0 x + sum_i lambda_i * adapter_i(x), adapters applied in list order.
template <typename T>
Activation<T> combine_adapters(const CombinedModel<T>& model, const Activation<T>& x);

/// W' = W0 + sum_i lambda_i * scale_i * delta W_i, merged in list order.
/// For disjoint same-side standard-basis adapters every entry receives at
/// most one update, so the result does not depend on the order.
template <typename T>
Matrix<T> merge_all(const CombinedModel<T>& model);

}  // namespace sbora
