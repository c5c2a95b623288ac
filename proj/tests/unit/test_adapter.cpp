// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sbora/adapter.hpp"

using namespace sbora;
using oracle::random_matrix;

namespace {

template <typename T>
AdapterLayer<T> random_layer(AdapterKind kind, std::size_t d, std::size_t k, std::size_t r, Rng& rng,
                             bool zero_trainable = false) {
  auto w0 = share(random_matrix<T>(d, k, rng));
  auto maybe = [&](std::size_t rows, std::size_t cols) {
    return zero_trainable ? Matrix<T>(rows, cols) : random_matrix<T>(rows, cols, rng);
  };
  switch (kind) {
    case AdapterKind::lora:
      return AdapterLayer<T>::lora(w0, random_matrix<T>(r, k, rng), maybe(d, r));
    case AdapterKind::sbora_fa:
      return AdapterLayer<T>::sbora_fa(w0, sample_basis_indices(k, r, rng.next_u64()), maybe(d, r));
    case AdapterKind::sbora_fb:
      return AdapterLayer<T>::sbora_fb(w0, sample_basis_indices(d, r, rng.next_u64()), maybe(r, k));
  }
  throw std::logic_error("unreachable");
}

constexpr AdapterKind kAllKinds[] = {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb};

}  // namespace

TEST_CASE("fresh layers reproduce W0 x exactly") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(10), k = 1 + rng.below(10);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    auto w0 = share(random_matrix<double>(d, k, rng));
    const auto x = random_matrix<double>(1 + rng.below(4), k, rng);
    const auto expect = oracle::matmul(x, oracle::transpose(*w0));

    const auto lora = AdapterLayer<double>::lora(w0, static_cast<std::uint32_t>(r), rng.next_u64());
    const auto fa = AdapterLayer<double>::sbora_fa(w0, sample_basis_indices(k, r, rng.next_u64()));
    const auto fb = AdapterLayer<double>::sbora_fb(w0, sample_basis_indices(d, r, rng.next_u64()));
    CHECK(forward(lora, x) == expect);
    CHECK(forward(fa, x) == expect);
    CHECK(forward(fb, x) == expect);
  }
}

TEST_CASE("LoRA init: A uniform within the fan-in bound, B zero") {
  auto w0 = share(Matrix<double>(6, 25));
  const auto l = AdapterLayer<double>::lora(w0, 3, 42);
  const double bound = 1.0 / 5.0;
  double lo = 1, hi = -1;
  for (double v : l.a().values()) {
    CHECK(std::abs(v) <= bound);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);
  for (double v : l.b().values()) CHECK(v == 0.0);
  CHECK(l.a() == AdapterLayer<double>::lora(w0, 3, 42).a());
}

TEST_CASE("lora_forward matches (W0 + B A) x in float") {
  Rng rng(2);
  const auto layer = random_layer<float>(AdapterKind::lora, 4, 4, 2, rng);
  const auto x = random_matrix<float>(3, 4, rng);
  const auto merged = oracle::add(layer.w0(), oracle::dense_delta(layer));
  const auto expect = oracle::matmul(x, oracle::transpose(merged));
  const auto h = lora_forward(layer, x);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h.values()[i] - expect.values()[i]) <= 1e-5f);
}

TEST_CASE("LoRA with a one-hot A equals the sampled sbora-fa path") {
  Rng rng(3);
  auto w0 = share(random_matrix<double>(5, 4, rng));
  const BasisIndexSet basis(4, {0, 3});
  const auto b = random_matrix<double>(5, 2, rng);
  const auto lora = AdapterLayer<double>::lora(w0, materialize_basis<double>(basis, BasisSide::row), b);
  const auto fa = AdapterLayer<double>::sbora_fa(w0, basis, b);
  const auto x = random_matrix<double>(6, 4, rng);
  CHECK(lora_forward(lora, x) == sbora_fa_forward(fa, x));
}

TEST_CASE("sbora_fa_forward gathers the basis components") {
  // k = 4, basis {0,3}: the projection-down of x is [x1, x4].
  auto w0 = share(Matrix<double>(2, 4, {1, 2, 3, 4, 5, 6, 7, 8}));
  const auto fa = AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(4, {0, 3}),
                                                 Matrix<double>(2, 2, {1, 10, 100, 1000}));
  const Matrix<double> x(1, 4, {2, 3, 5, 7});
  // W0 x = [1*2+2*3+3*5+4*7, 5*2+6*3+7*5+8*7] = [51, 119]
  // B [x1, x4] = [1*2 + 10*7, 100*2 + 1000*7] = [72, 7200]
  CHECK(sbora_fa_forward(fa, x) == Matrix<double>(1, 2, {123, 7319}));
}

TEST_CASE("sbora_fb_forward only moves the basis outputs") {
  Rng rng(4);
  auto w0 = share(random_matrix<double>(4, 5, rng));
  const auto fb = AdapterLayer<double>::sbora_fb(w0, BasisIndexSet(4, {0, 3}), random_matrix<double>(2, 5, rng));
  const auto x = random_matrix<double>(3, 5, rng);
  const auto h = sbora_fb_forward(fb, x);
  const auto base = base_forward(*w0, x);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(h(n, 0) != base(n, 0));
    CHECK(h(n, 1) == base(n, 1));
    CHECK(h(n, 2) == base(n, 2));
    CHECK(h(n, 3) != base(n, 3));
  }
}

TEST_CASE("sampled forwards equal the dense one-hot oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(16), k = 1 + rng.below(16);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    const auto kind = trial % 2 ? AdapterKind::sbora_fa : AdapterKind::sbora_fb;
    const auto x64 = random_matrix<double>(1 + rng.below(5), k, rng);
    const auto l64 = random_layer<double>(kind, d, k, r, rng);
    CHECK(forward(l64, x64) == oracle::dense_forward(l64, x64));

    const auto l32 = random_layer<float>(kind, d, k, r, rng);
    const auto x32 = random_matrix<float>(2, k, rng);
    const auto h = forward(l32, x32);
    const auto ref = oracle::dense_forward(l32, x32);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h.values()[i] - ref.values()[i]) <= 1e-6f);
  }
}

TEST_CASE("scale multiplies the adapter contribution") {
  Rng rng(6);
  for (auto kind : kAllKinds) {
    auto l1 = random_layer<double>(kind, 5, 4, 2, rng);
    const auto x = random_matrix<double>(3, 4, rng);
    AdapterLayer<double> l2 = kind == AdapterKind::lora
        ? AdapterLayer<double>::lora(l1.w0_ptr(), l1.a(), l1.b(), 0.25)
        : kind == AdapterKind::sbora_fa ? AdapterLayer<double>::sbora_fa(l1.w0_ptr(), *l1.basis(), l1.b(), 0.25)
                                        : AdapterLayer<double>::sbora_fb(l1.w0_ptr(), *l1.basis(), l1.a(), 0.25);
    const auto base = base_forward(l1.w0(), x);
    const auto full = forward(l1, x);
    const auto quarter = forward(l2, x);
    for (std::size_t i = 0; i < full.size(); ++i) {
      const double delta = full.values()[i] - base.values()[i];
      CHECK(quarter.values()[i] - base.values()[i] == doctest::Approx(0.25 * delta).epsilon(1e-12));
    }
  }
  CHECK(lora_alpha_scale(16.0, 8) == 2.0);
}

TEST_CASE("forward: shape and kind errors") {
  Rng rng(7);
  auto w0 = share(random_matrix<double>(4, 3, rng));
  const auto fa = AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(3, {1}));
  CHECK_THROWS_AS(forward(fa, Matrix<double>(2, 4)), DimensionError);
  CHECK_THROWS_AS(AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(4, {1})), DimensionError);
  CHECK_THROWS_AS(AdapterLayer<double>::sbora_fb(w0, BasisIndexSet(3, {1})), DimensionError);
  CHECK_THROWS_AS(AdapterLayer<double>::lora(w0, Matrix<double>(2, 3), Matrix<double>(4, 3)), DimensionError);
  CHECK_THROWS_AS(AdapterLayer<double>::lora(w0, 0, 1), InvalidRankError);
  CHECK_THROWS_AS(sbora_fb_forward(fa, Matrix<double>(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(fa.a(), std::logic_error);
  CHECK(forward(fa, Matrix<double>(0, 3)).rows() == 0);
}

TEST_CASE("delta_weight: sbora-fa writes B into the basis columns") {
  // b_ij = 10 i + j, 1-based, basis {0,3}
  auto w0 = share(Matrix<double>(4, 4));
  const Matrix<double> b(4, 2, {11, 12, 21, 22, 31, 32, 41, 42});
  const auto fa = AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(4, {0, 3}), b);
  CHECK(delta_weight(fa) == Matrix<double>(4, 4, {11, 0, 0, 12,
                                                  21, 0, 0, 22,
                                                  31, 0, 0, 32,
                                                  41, 0, 0, 42}));
}

TEST_CASE("delta_weight: sbora-fb writes A into the basis rows") {
  auto w0 = share(Matrix<double>(4, 4));
  const Matrix<double> a(2, 4, {11, 12, 13, 14, 21, 22, 23, 24});
  const auto fb = AdapterLayer<double>::sbora_fb(w0, BasisIndexSet(4, {0, 3}), a);
  CHECK(delta_weight(fb) == Matrix<double>(4, 4, {11, 12, 13, 14,
                                                  0, 0, 0, 0,
                                                  0, 0, 0, 0,
                                                  21, 22, 23, 24}));
}

TEST_CASE("delta_weight: zero trainable gives zero, and matches B A") {
  Rng rng(8);
  for (auto kind : kAllKinds) {
    const auto zero = random_layer<double>(kind, 6, 5, 2, rng, true);
    const auto dw = delta_weight(zero);
    for (double v : dw.values()) CHECK(v == 0.0);
    const auto l = random_layer<double>(kind, 6, 5, 2, rng);
    CHECK(delta_weight(l) == oracle::dense_delta(l));
  }
}

TEST_CASE("merge: worked 4x4 patterns with symbolic-style entries") {
  // w_ij = i + j/10, b_ij = 100 i + 10 j (1-based) so each sum is distinguishable.
  Matrix<double> w(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) w(i, j) = (i + 1) + (j + 1) / 10.0;
  auto w0 = share(w);
  const Matrix<double> b(4, 2, {110, 120, 210, 220, 310, 320, 410, 420});
  const auto fa = merge(AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(4, {0, 3}), b));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(fa(i, 0) == w(i, 0) + b(i, 0));
    CHECK(fa(i, 1) == w(i, 1));
    CHECK(fa(i, 2) == w(i, 2));
    CHECK(fa(i, 3) == w(i, 3) + b(i, 1));
  }
  const Matrix<double> a(2, 4, {110, 120, 130, 140, 210, 220, 230, 240});
  const auto fb = merge(AdapterLayer<double>::sbora_fb(w0, BasisIndexSet(4, {0, 3}), a));
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(fb(0, j) == w(0, j) + a(0, j));
    CHECK(fb(1, j) == w(1, j));
    CHECK(fb(2, j) == w(2, j));
    CHECK(fb(3, j) == w(3, j) + a(1, j));
  }
}

TEST_CASE("merge: untouched region is bitwise W0; zero adapter is a no-op") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(12), k = 1 + rng.below(12);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    for (auto kind : {AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
      const auto l = random_layer<double>(kind, d, k, r, rng);
      const auto wp = merge(l);
      const auto& basis = *l.basis();
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const bool region = kind == AdapterKind::sbora_fa ? basis.contains(j) : basis.contains(i);
          if (!region) CHECK(std::bit_cast<std::uint64_t>(wp(i, j)) == std::bit_cast<std::uint64_t>(l.w0()(i, j)));
        }
      }
    }
    for (auto kind : kAllKinds) {
      const auto zero = random_layer<double>(kind, d, k, r, rng, true);
      CHECK(merge(zero) == zero.w0());
    }
  }
}

TEST_CASE("rank of delta W never exceeds r") {
  Rng rng(10);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + rng.below(9), k = 1 + rng.below(9);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    for (auto kind : kAllKinds) {
      CHECK(oracle::numerical_rank(delta_weight(random_layer<double>(kind, d, k, r, rng))) <= r);
    }
  }
}

TEST_CASE("merged weight reproduces the adapter forward") {
  Rng rng(12);
  for (auto kind : kAllKinds) {
    const auto l = random_layer<double>(kind, 7, 6, 3, rng);
    const auto x = random_matrix<double>(4, 6, rng);
    const auto via_merge = base_forward(merge(l), x);
    const auto direct = forward(l, x);
    for (std::size_t i = 0; i < direct.size(); ++i)
      CHECK(via_merge.values()[i] == doctest::Approx(direct.values()[i]).epsilon(1e-12));
  }
}
