// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "sbora/basis.hpp"
#include "sbora/matrix.hpp"
#include "sbora/op_counters.hpp"

namespace sbora {

/// Adapter flavours. The numeric values are the on-disk kind codes; 0 is
/// reserved for a bare base-weight file.
enum class AdapterKind : std::uint32_t {
  lora = 1,      ///< trainable A (r x k) and B (d x r)
  sbora_fa = 2,  ///< frozen row basis over the k inputs, trainable B (d x r)
  sbora_fb = 3,  ///< frozen column basis over the d outputs, trainable A (r x k)
};

std::string_view to_string(AdapterKind kind);
/// Accepts "lora", "fa"/"sbora-fa", "fb"/"sbora-fb". Throws std::invalid_argument.
AdapterKind parse_adapter_kind(std::string_view name);

/// A frozen d x k base weight W0 plus one low-rank adapter.
///
/// The base and (for the standard-basis kinds) the index set are only
/// reachable through const accessors, so nothing downstream of construction
/// can modify them. The trainable factors are exposed mutably for the
/// optimizer. Layers share their base through a shared_ptr; copying a layer
/// copies only the adapter state.
template <typename T>
class AdapterLayer {
 public:
  using BasePtr = std::shared_ptr<const Matrix<T>>;

  /// LoRA with A ~ U[-1/sqrt(k), 1/sqrt(k)] and B = 0.
  static AdapterLayer lora(BasePtr w0, std::uint32_t r, std::uint64_t seed, T scale = T(1));
  static AdapterLayer lora(BasePtr w0, Matrix<T> a, Matrix<T> b, T scale = T(1));

  /// Standard-basis projection-down over the inputs; B starts at zero.
  static AdapterLayer sbora_fa(BasePtr w0, BasisIndexSet basis, T scale = T(1));
  static AdapterLayer sbora_fa(BasePtr w0, BasisIndexSet basis, Matrix<T> b, T scale = T(1));

  /// Standard-basis projection-up over the outputs; A starts at zero.
  static AdapterLayer sbora_fb(BasePtr w0, BasisIndexSet basis, T scale = T(1));
  static AdapterLayer sbora_fb(BasePtr w0, BasisIndexSet basis, Matrix<T> a, T scale = T(1));

  AdapterKind kind() const noexcept { return kind_; }
  std::size_t d() const noexcept { return w0_->rows(); }
  std::size_t k() const noexcept { return w0_->cols(); }
  std::size_t r() const noexcept { return r_; }
  T scale() const noexcept { return scale_; }

  const Matrix<T>& w0() const noexcept { return *w0_; }
  const BasePtr& w0_ptr() const noexcept { return w0_; }
  /// Present for the standard-basis kinds only.
  const std::optional<BasisIndexSet>& basis() const noexcept { return basis_; }

  bool has_a() const noexcept { return kind_ != AdapterKind::sbora_fa; }
  bool has_b() const noexcept { return kind_ != AdapterKind::sbora_fb; }
  /// Throw std::logic_error when the factor does not exist for this kind.
  const Matrix<T>& a() const;
  const Matrix<T>& b() const;
  Matrix<T>& a();
  Matrix<T>& b();

  /// Trainable factors in a fixed order (A before B).
  std::vector<Matrix<T>*> trainables();
  std::vector<const Matrix<T>*> trainables() const;
  std::size_t trainable_count() const noexcept;

 private:
  AdapterLayer(AdapterKind kind, BasePtr w0, std::size_t r, std::optional<BasisIndexSet> basis,
               Matrix<T> a, Matrix<T> b, T scale);

  AdapterKind kind_;
  BasePtr w0_;
  std::size_t r_;
  std::optional<BasisIndexSet> basis_;
  Matrix<T> a_;
  Matrix<T> b_;
  T scale_;
};

/// LoRA-style alpha/r scale for the baseline.
template <typename T>
T lora_alpha_scale(T alpha, std::uint32_t r) {
  return alpha / static_cast<T>(r);
}

template <typename T>
std::shared_ptr<const Matrix<T>> share(Matrix<T> m) {
  return std::make_shared<const Matrix<T>>(std::move(m));
}

// Forward passes. x is batch x k, the result batch x d. Every product is a
// left-to-right dot product (first product, then one add per further term),
// and the adapter contribution is added to W0 x last. The counted overloads
// tally every scalar multiply/add performed.

/// h = W0 x + scale * B (A x); delta W is never formed.
template <typename T>
Activation<T> lora_forward(const AdapterLayer<T>& layer, const Activation<T>& x);

/// h = W0 x + scale * B x[:, basis]; the projection-down is a gather.
template <typename T>
Activation<T> sbora_fa_forward(const AdapterLayer<T>& layer, const Activation<T>& x);

/// z = A x; h = W0 x, then scale * z index-added at the basis rows.
template <typename T>
Activation<T> sbora_fb_forward(const AdapterLayer<T>& layer, const Activation<T>& x);

/// Dispatches on layer.kind().
template <typename T>
Activation<T> forward(const AdapterLayer<T>& layer, const Activation<T>& x);
template <typename T>
Activation<T> forward(const AdapterLayer<T>& layer, const Activation<T>& x, OpCounters& counters);

/// Same as forward() but with `base` standing in for the layer's W0
/// (used for the quantized-base path).
template <typename T>
Activation<T> forward_on_base(const Matrix<T>& base, const AdapterLayer<T>& layer,
                              const Activation<T>& x);
template <typename T>
Activation<T> forward_on_base(const Matrix<T>& base, const AdapterLayer<T>& layer,
                              const Activation<T>& x, OpCounters& counters);

/// W0 x alone.
template <typename T>
Activation<T> base_forward(const Matrix<T>& base, const Activation<T>& x);

/// Add lambda * scale * adapter(x) into h (batch x d) in place.
template <typename T>
void accumulate_adapter(const AdapterLayer<T>& layer, const Activation<T>& x, T lambda,
                        Activation<T>& h);

/// Unscaled delta W as a dense d x k matrix. For the standard-basis kinds only
/// the basis columns (FA) or rows (FB) are written; every other entry is 0.
template <typename T>
Matrix<T> delta_weight(const AdapterLayer<T>& layer);

/// W' = W0 + scale * delta W. Entries outside the updated region are copied,
/// never touched by arithmetic.
template <typename T>
Matrix<T> merge(const AdapterLayer<T>& layer);

/// w += lambda * scale * delta W, in place, with the same regional guarantee.
template <typename T>
void merge_into(Matrix<T>& w, const AdapterLayer<T>& layer, T lambda = T(1));

}  // namespace sbora
