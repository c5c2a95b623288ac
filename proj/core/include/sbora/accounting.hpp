// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "sbora/adapter.hpp"
#include "sbora/op_counters.hpp"

namespace sbora {

/// Memory and arithmetic cost of one adapted d x k layer at rank r.
struct CostReport {
  AdapterKind method = AdapterKind::lora;
  std::uint64_t d = 0, k = 0, r = 0;
  std::uint64_t trainable_params = 0;
  std::uint64_t total_params = 0;   ///< adapter storage: trainable values + index slots
  std::uint64_t gradient_values = 0;
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Adapter parameter counts (W0 excluded):
///
///   method     trainable   total          gradient
///   lora       (k+d) r     (k+d) r        (k+d) r
///   sbora-fa   d r         d r + r        d r
///   sbora-fb   k r         k r + r        k r
///
/// The r extra slots are the stored basis indices.
CostReport analytic_params(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r);

/// Scalar operations of one forward pass over `batch` input rows, with
/// unit scale. Per row:
///
///   base W0 x       d k mults, d (k-1) adds
///   lora            + r k + d r mults, + r (k-1) + d (r-1) + d adds
///   sbora-fa        + d r mults,       + d (r-1) + d adds        (gather is free)
///   sbora-fb        + r k mults,       + r (k-1) + r adds        (index-add of r values)
CostReport analytic_flops(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r,
                          std::uint64_t batch = 1);

/// Both parts in one report.
CostReport analytic_cost(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r);

/// Runs the instrumented forward kernel on `x` and returns its counters.
template <typename T>
OpCounters measured_cost(const AdapterLayer<T>& layer, const Activation<T>& x);

/// Builds a random layer of the given shape (unit scale, nonzero trainable
/// factors) and measures a forward pass over `batch` random rows.
OpCounters measured_cost(AdapterKind method, std::uint32_t d, std::uint32_t k, std::uint32_t r,
                         std::uint64_t batch = 1, std::uint64_t seed = 0);

std::string to_json(const CostReport& report);

/// "method,d,k,r,trainable,total,grad,mults,adds"
std::string cost_csv_header();
std::string cost_csv_row(const CostReport& report);

}  // namespace sbora
