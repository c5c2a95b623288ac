// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>

#include "sbora/errors.hpp"

namespace sbora {

/// Scalar multiply/add tallies for one kernel invocation.
struct OpCounters {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;

  void reset() noexcept { mults = adds = 0; }

  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

namespace detail {

// Arithmetic policies used by the forward kernels. Every scalar multiply and
// add in a kernel goes through one of these, so the counting policy sees
// exactly the operations the plain policy performs.
struct PlainOps {
  template <typename T>
  T mul(T a, T b) const noexcept { return a * b; }
  template <typename T>
  T add(T a, T b) const noexcept { return a + b; }
};

class CountingOps {
 public:
  explicit CountingOps(OpCounters& c) noexcept : c_(&c) {}

  template <typename T>
  T mul(T a, T b) const {
    bump(c_->mults);
    return a * b;
  }
  template <typename T>
  T add(T a, T b) const {
    bump(c_->adds);
    return a + b;
  }

 private:
  static void bump(std::uint64_t& v) {
    if (v == std::numeric_limits<std::uint64_t>::max()) {
      throw NumericError("operation counter overflow");
    }
    ++v;
  }

  OpCounters* c_;
};

}  // namespace detail
}  // namespace sbora
