// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

// Forward-pass wall time for the three adapter kinds at a fixed rank, and the
// merge cost. Informational only; counts are reported by `sbora bench`.

#include <benchmark/benchmark.h>

#include "sbora/sbora.hpp"

namespace {

using sbora::AdapterKind;
using sbora::AdapterLayer;
using sbora::Matrix;
using sbora::Rng;

Matrix<float> gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix<float> m(rows, cols);
  for (float& v : m.values()) v = static_cast<float>(rng.normal());
  return m;
}

AdapterLayer<float> make_layer(AdapterKind kind, std::uint32_t d, std::uint32_t k, std::uint32_t r) {
  Rng rng(7);
  auto w0 = sbora::share(gaussian(d, k, rng));
  switch (kind) {
    case AdapterKind::lora:
      return AdapterLayer<float>::lora(w0, gaussian(r, k, rng), gaussian(d, r, rng));
    case AdapterKind::sbora_fa:
      return AdapterLayer<float>::sbora_fa(w0, sbora::sample_basis_indices(k, r, 1), gaussian(d, r, rng));
    default:
      return AdapterLayer<float>::sbora_fb(w0, sbora::sample_basis_indices(d, r, 1), gaussian(r, k, rng));
  }
}

// Adapter path only: h = s * adapter(x) on a zero accumulator.
void BM_AdapterPath(benchmark::State& state) {
  const auto kind = static_cast<AdapterKind>(state.range(0));
  const auto dim = static_cast<std::uint32_t>(state.range(1));
  const auto r = static_cast<std::uint32_t>(state.range(2));
  const auto layer = make_layer(kind, dim, dim, r);
  Rng rng(3);
  const auto x = gaussian(16, dim, rng);
  Matrix<float> h(16, dim);
  for (auto _ : state) {
    h.fill(0.0f);
    sbora::accumulate_adapter(layer, x, 1.0f, h);
    benchmark::DoNotOptimize(h.values().data());
  }
  state.SetLabel(std::string(sbora::to_string(kind)));
}

void BM_FullForward(benchmark::State& state) {
  const auto kind = static_cast<AdapterKind>(state.range(0));
  const auto dim = static_cast<std::uint32_t>(state.range(1));
  const auto layer = make_layer(kind, dim, dim, static_cast<std::uint32_t>(state.range(2)));
  Rng rng(3);
  const auto x = gaussian(16, dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sbora::forward(layer, x));
  state.SetLabel(std::string(sbora::to_string(kind)));
}

void BM_Merge(benchmark::State& state) {
  const auto kind = static_cast<AdapterKind>(state.range(0));
  const auto dim = static_cast<std::uint32_t>(state.range(1));
  const auto layer = make_layer(kind, dim, dim, static_cast<std::uint32_t>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(sbora::merge(layer));
  state.SetLabel(std::string(sbora::to_string(kind)));
}

void Kinds(benchmark::internal::Benchmark* b) {
  for (int kind = 1; kind <= 3; ++kind) b->Args({kind, 512, 32});
}

}  // namespace

BENCHMARK(BM_AdapterPath)->Apply(Kinds);
BENCHMARK(BM_FullForward)->Apply(Kinds);
BENCHMARK(BM_Merge)->Apply(Kinds);

BENCHMARK_MAIN();
