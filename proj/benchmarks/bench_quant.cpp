// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "sbora/quant.hpp"
#include "sbora/rng.hpp"

namespace {

sbora::Matrix<float> weights(std::size_t n) {
  sbora::Rng rng(11);
  sbora::Matrix<float> w(n, n);
  for (float& v : w.values()) v = static_cast<float>(rng.normal());
  return w;
}

void BM_Quantize(benchmark::State& state) {
  const auto w = weights(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sbora::quantize(w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}

void BM_Dequantize(benchmark::State& state) {
  const auto q = sbora::quantize(weights(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(sbora::dequantize<float>(q));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.rows() * q.cols()));
}

}  // namespace

BENCHMARK(BM_Quantize)->Arg(256)->Arg(1024);
BENCHMARK(BM_Dequantize)->Arg(256)->Arg(1024);
