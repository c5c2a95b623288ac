// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/adapter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sbora/rng.hpp"

namespace sbora {

std::string_view to_string(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::lora: return "lora";
    case AdapterKind::sbora_fa: return "sbora-fa";
    case AdapterKind::sbora_fb: return "sbora-fb";
  }
  return "unknown";
}

AdapterKind parse_adapter_kind(std::string_view name) {
  if (name == "lora") return AdapterKind::lora;
  if (name == "fa" || name == "sbora-fa" || name == "sbora_fa") return AdapterKind::sbora_fa;
  if (name == "fb" || name == "sbora-fb" || name == "sbora_fb") return AdapterKind::sbora_fb;
  throw std::invalid_argument("unknown adapter method '" + std::string(name) +
                              "' (expected lora, fa or fb)");
}

namespace {

void require_base(const void* w0) {
  if (w0 == nullptr) throw std::invalid_argument("AdapterLayer: null base weight");
}

void require_positive_shape(std::size_t d, std::size_t k) {
  if (d == 0 || k == 0) throw DimensionError("AdapterLayer: base weight must be non-empty");
}

template <typename T>
void require_shape(const Matrix<T>& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("AdapterLayer: ") + what + " is " + shape_string(m) +
                         ", expected " + shape_string(rows, cols));
  }
}

}  // namespace

template <typename T>
AdapterLayer<T>::AdapterLayer(AdapterKind kind, BasePtr w0, std::size_t r,
                              std::optional<BasisIndexSet> basis, Matrix<T> a, Matrix<T> b,
                              T scale)
    : kind_(kind), w0_(std::move(w0)), r_(r), basis_(std::move(basis)), a_(std::move(a)),
      b_(std::move(b)), scale_(scale) {}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::lora(BasePtr w0, std::uint32_t r, std::uint64_t seed, T scale) {
  require_base(w0.get());
  const std::size_t d = w0->rows(), k = w0->cols();
  require_positive_shape(d, k);
  if (r == 0) throw InvalidRankError("invalid rank 0 (need r >= 1)");
  Matrix<T> a(r, k);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(k));
  for (T& v : a.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  return lora(std::move(w0), std::move(a), Matrix<T>(d, r), scale);
}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::lora(BasePtr w0, Matrix<T> a, Matrix<T> b, T scale) {
  require_base(w0.get());
  const std::size_t d = w0->rows(), k = w0->cols();
  require_positive_shape(d, k);
  const std::size_t r = a.rows();
  if (r == 0) throw InvalidRankError("invalid rank 0 (need r >= 1)");
  require_shape(a, r, k, "A");
  require_shape(b, d, r, "B");
  return AdapterLayer(AdapterKind::lora, std::move(w0), r, std::nullopt, std::move(a),
                      std::move(b), scale);
}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::sbora_fa(BasePtr w0, BasisIndexSet basis, T scale) {
  require_base(w0.get());
  Matrix<T> b(w0->rows(), basis.rank());
  return sbora_fa(std::move(w0), std::move(basis), std::move(b), scale);
}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::sbora_fa(BasePtr w0, BasisIndexSet basis, Matrix<T> b, T scale) {
  require_base(w0.get());
  const std::size_t d = w0->rows(), k = w0->cols();
  require_positive_shape(d, k);
  if (basis.dim() != k) {
    throw DimensionError("sbora-fa: basis dim " + std::to_string(basis.dim()) +
                         " != input width k=" + std::to_string(k));
  }
  const std::size_t r = basis.rank();
  require_shape(b, d, r, "B");
  return AdapterLayer(AdapterKind::sbora_fa, std::move(w0), r, std::move(basis), Matrix<T>(),
                      std::move(b), scale);
}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::sbora_fb(BasePtr w0, BasisIndexSet basis, T scale) {
  require_base(w0.get());
  Matrix<T> a(basis.rank(), w0->cols());
  return sbora_fb(std::move(w0), std::move(basis), std::move(a), scale);
}

template <typename T>
AdapterLayer<T> AdapterLayer<T>::sbora_fb(BasePtr w0, BasisIndexSet basis, Matrix<T> a, T scale) {
  require_base(w0.get());
  const std::size_t d = w0->rows(), k = w0->cols();
  require_positive_shape(d, k);
  if (basis.dim() != d) {
    throw DimensionError("sbora-fb: basis dim " + std::to_string(basis.dim()) +
                         " != output width d=" + std::to_string(d));
  }
  const std::size_t r = basis.rank();
  require_shape(a, r, k, "A");
  return AdapterLayer(AdapterKind::sbora_fb, std::move(w0), r, std::move(basis), std::move(a),
                      Matrix<T>(), scale);
}

template <typename T>
const Matrix<T>& AdapterLayer<T>::a() const {
  if (!has_a()) throw std::logic_error("sbora-fa layers have no trainable A");
  return a_;
}

template <typename T>
const Matrix<T>& AdapterLayer<T>::b() const {
  if (!has_b()) throw std::logic_error("sbora-fb layers have no trainable B");
  return b_;
}

template <typename T>
Matrix<T>& AdapterLayer<T>::a() {
  if (!has_a()) throw std::logic_error("sbora-fa layers have no trainable A");
  return a_;
}

template <typename T>
Matrix<T>& AdapterLayer<T>::b() {
  if (!has_b()) throw std::logic_error("sbora-fb layers have no trainable B");
  return b_;
}

template <typename T>
std::vector<Matrix<T>*> AdapterLayer<T>::trainables() {
  std::vector<Matrix<T>*> out;
  if (has_a()) out.push_back(&a_);
  if (has_b()) out.push_back(&b_);
  return out;
}

template <typename T>
std::vector<const Matrix<T>*> AdapterLayer<T>::trainables() const {
  std::vector<const Matrix<T>*> out;
  if (has_a()) out.push_back(&a_);
  if (has_b()) out.push_back(&b_);
  return out;
}

template <typename T>
std::size_t AdapterLayer<T>::trainable_count() const noexcept {
  return (has_a() ? a_.size() : 0) + (has_b() ? b_.size() : 0);
}

namespace {

template <typename T>
void check_input(const Matrix<T>& base, const Activation<T>& x) {
  if (x.cols() != base.cols()) {
    throw DimensionError("forward: input has " + std::to_string(x.cols()) +
                         " features, layer expects k=" + std::to_string(base.cols()));
  }
}

template <typename T, typename Layer>
void check_base(const Matrix<T>& base, const Layer& layer) {
  if (base.rows() != layer.d() || base.cols() != layer.k()) {
    throw DimensionError("forward: base is " + shape_string(base) + ", adapter expects " +
                         shape_string(layer.d(), layer.k()));
  }
}

// Left-to-right dot product of two equal-length, non-empty spans.
template <typename T, typename Ops>
T dot(std::span<const T> u, std::span<const T> v, const Ops& ops) {
  T acc = ops.mul(u[0], v[0]);
  for (std::size_t j = 1; j < u.size(); ++j) acc = ops.add(acc, ops.mul(u[j], v[j]));
  return acc;
}

template <typename T, typename Ops>
Activation<T> base_kernel(const Matrix<T>& w, const Activation<T>& x, const Ops& ops) {
  Activation<T> h(x.rows(), w.rows());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    auto xr = x.row(n);
    for (std::size_t i = 0; i < w.rows(); ++i) h(n, i) = dot<T>(w.row(i), xr, ops);
  }
  return h;
}

// z = A x for every batch row (batch x r).
template <typename T, typename Ops>
Matrix<T> project_down(const Matrix<T>& a, const Activation<T>& x, const Ops& ops) {
  Matrix<T> z(x.rows(), a.rows());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    auto xr = x.row(n);
    for (std::size_t p = 0; p < a.rows(); ++p) z(n, p) = dot<T>(a.row(p), xr, ops);
  }
  return z;
}

// x[:, basis] -- the sampling form of the one-hot projection-down. No arithmetic.
template <typename T>
Matrix<T> gather_columns(const Activation<T>& x, const BasisIndexSet& basis) {
  Matrix<T> z(x.rows(), basis.rank());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    for (std::size_t p = 0; p < basis.rank(); ++p) z(n, p) = x(n, basis[p]);
  }
  return z;
}

// h += coeff * B z, one output row at a time.
template <typename T, typename Ops>
void project_up_add(const Matrix<T>& b, const Matrix<T>& z, T coeff, Activation<T>& h,
                    const Ops& ops) {
  for (std::size_t n = 0; n < z.rows(); ++n) {
    auto zr = z.row(n);
    for (std::size_t i = 0; i < b.rows(); ++i) {
      T u = dot<T>(b.row(i), zr, ops);
      if (coeff != T(1)) u = ops.mul(coeff, u);
      h(n, i) = ops.add(h(n, i), u);
    }
  }
}

// h[:, basis[p]] += coeff * z[:, p]
template <typename T, typename Ops>
void index_add(const Matrix<T>& z, const BasisIndexSet& basis, T coeff, Activation<T>& h,
               const Ops& ops) {
  for (std::size_t n = 0; n < z.rows(); ++n) {
    for (std::size_t p = 0; p < basis.rank(); ++p) {
      T v = z(n, p);
      if (coeff != T(1)) v = ops.mul(coeff, v);
      h(n, basis[p]) = ops.add(h(n, basis[p]), v);
    }
  }
}

template <typename T, typename Ops>
void accumulate_kernel(const AdapterLayer<T>& layer, const Activation<T>& x, T coeff,
                       Activation<T>& h, const Ops& ops) {
  switch (layer.kind()) {
    case AdapterKind::lora: {
      const Matrix<T> z = project_down(layer.a(), x, ops);
      project_up_add(layer.b(), z, coeff, h, ops);
      return;
    }
    case AdapterKind::sbora_fa: {
      const Matrix<T> z = gather_columns(x, *layer.basis());
      project_up_add(layer.b(), z, coeff, h, ops);
      return;
    }
    case AdapterKind::sbora_fb: {
      const Matrix<T> z = project_down(layer.a(), x, ops);
      index_add(z, *layer.basis(), coeff, h, ops);
      return;
    }
  }
}

template <typename T, typename Ops>
Activation<T> forward_kernel(const Matrix<T>& base, const AdapterLayer<T>& layer,
                             const Activation<T>& x, const Ops& ops) {
  check_base(base, layer);
  check_input(base, x);
  Activation<T> h = base_kernel(base, x, ops);
  accumulate_kernel(layer, x, layer.scale(), h, ops);
  return h;
}

template <typename T>
void require_kind(const AdapterLayer<T>& layer, AdapterKind want) {
  if (layer.kind() != want) {
    throw std::invalid_argument(std::string(to_string(want)) + " forward called on a " +
                                std::string(to_string(layer.kind())) + " layer");
  }
}

}  // namespace

template <typename T>
Activation<T> base_forward(const Matrix<T>& base, const Activation<T>& x) {
  check_input(base, x);
  return base_kernel(base, x, detail::PlainOps{});
}

template <typename T>
Activation<T> lora_forward(const AdapterLayer<T>& layer, const Activation<T>& x) {
  require_kind(layer, AdapterKind::lora);
  return forward(layer, x);
}

template <typename T>
Activation<T> sbora_fa_forward(const AdapterLayer<T>& layer, const Activation<T>& x) {
  require_kind(layer, AdapterKind::sbora_fa);
  return forward(layer, x);
}

template <typename T>
Activation<T> sbora_fb_forward(const AdapterLayer<T>& layer, const Activation<T>& x) {
  require_kind(layer, AdapterKind::sbora_fb);
  return forward(layer, x);
}

template <typename T>
Activation<T> forward(const AdapterLayer<T>& layer, const Activation<T>& x) {
  return forward_kernel(layer.w0(), layer, x, detail::PlainOps{});
}

template <typename T>
Activation<T> forward(const AdapterLayer<T>& layer, const Activation<T>& x, OpCounters& counters) {
  return forward_kernel(layer.w0(), layer, x, detail::CountingOps{counters});
}

template <typename T>
Activation<T> forward_on_base(const Matrix<T>& base, const AdapterLayer<T>& layer,
                              const Activation<T>& x) {
  return forward_kernel(base, layer, x, detail::PlainOps{});
}

template <typename T>
Activation<T> forward_on_base(const Matrix<T>& base, const AdapterLayer<T>& layer,
                              const Activation<T>& x, OpCounters& counters) {
  return forward_kernel(base, layer, x, detail::CountingOps{counters});
}

template <typename T>
void accumulate_adapter(const AdapterLayer<T>& layer, const Activation<T>& x, T lambda,
                        Activation<T>& h) {
  check_input(layer.w0(), x);
  if (h.rows() != x.rows() || h.cols() != layer.d()) {
    throw DimensionError("accumulate_adapter: output is " + shape_string(h) + ", expected " +
                         shape_string(x.rows(), layer.d()));
  }
  const T coeff = lambda == T(1) ? layer.scale() : lambda * layer.scale();
  accumulate_kernel(layer, x, coeff, h, detail::PlainOps{});
}

template <typename T>
Matrix<T> delta_weight(const AdapterLayer<T>& layer) {
  Matrix<T> dw(layer.d(), layer.k());
  switch (layer.kind()) {
    case AdapterKind::lora: {
      const auto& a = layer.a();
      const auto& b = layer.b();
      for (std::size_t i = 0; i < dw.rows(); ++i) {
        for (std::size_t j = 0; j < dw.cols(); ++j) {
          T acc = b(i, 0) * a(0, j);
          for (std::size_t p = 1; p < layer.r(); ++p) acc += b(i, p) * a(p, j);
          dw(i, j) = acc;
        }
      }
      break;
    }
    case AdapterKind::sbora_fa: {
      const auto& basis = *layer.basis();
      for (std::size_t i = 0; i < dw.rows(); ++i) {
        for (std::size_t p = 0; p < basis.rank(); ++p) dw(i, basis[p]) = layer.b()(i, p);
      }
      break;
    }
    case AdapterKind::sbora_fb: {
      const auto& basis = *layer.basis();
      for (std::size_t p = 0; p < basis.rank(); ++p) {
        auto src = layer.a().row(p);
        auto dst = dw.row(basis[p]);
        std::copy(src.begin(), src.end(), dst.begin());
      }
      break;
    }
  }
  return dw;
}

template <typename T>
void merge_into(Matrix<T>& w, const AdapterLayer<T>& layer, T lambda) {
  if (w.rows() != layer.d() || w.cols() != layer.k()) {
    throw DimensionError("merge: target is " + shape_string(w) + ", adapter expects " +
                         shape_string(layer.d(), layer.k()));
  }
  const T coeff = lambda == T(1) ? layer.scale() : lambda * layer.scale();
  auto scaled = [coeff](T v) { return coeff == T(1) ? v : coeff * v; };
  switch (layer.kind()) {
    case AdapterKind::lora: {
      const Matrix<T> dw = delta_weight(layer);
      for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) += scaled(dw(i, j));
      }
      return;
    }
    case AdapterKind::sbora_fa: {
      const auto& basis = *layer.basis();
      for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t p = 0; p < basis.rank(); ++p) w(i, basis[p]) += scaled(layer.b()(i, p));
      }
      return;
    }
    case AdapterKind::sbora_fb: {
      const auto& basis = *layer.basis();
      for (std::size_t p = 0; p < basis.rank(); ++p) {
        auto src = layer.a().row(p);
        auto dst = w.row(basis[p]);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += scaled(src[j]);
      }
      return;
    }
  }
}

template <typename T>
Matrix<T> merge(const AdapterLayer<T>& layer) {
  Matrix<T> w = layer.w0();
  merge_into(w, layer, T(1));
  return w;
}

#define SBORA_INSTANTIATE_ADAPTER(T)                                                           \
  template class AdapterLayer<T>;                                                              \
  template Activation<T> base_forward(const Matrix<T>&, const Activation<T>&);                 \
  template Activation<T> lora_forward(const AdapterLayer<T>&, const Activation<T>&);           \
  template Activation<T> sbora_fa_forward(const AdapterLayer<T>&, const Activation<T>&);       \
  template Activation<T> sbora_fb_forward(const AdapterLayer<T>&, const Activation<T>&);       \
  template Activation<T> forward(const AdapterLayer<T>&, const Activation<T>&);                \
  template Activation<T> forward(const AdapterLayer<T>&, const Activation<T>&, OpCounters&);   \
  template Activation<T> forward_on_base(const Matrix<T>&, const AdapterLayer<T>&,             \
                                         const Activation<T>&);                                \
  template Activation<T> forward_on_base(const Matrix<T>&, const AdapterLayer<T>&,             \
                                         const Activation<T>&, OpCounters&);                   \
  template void accumulate_adapter(const AdapterLayer<T>&, const Activation<T>&, T,            \
                                   Activation<T>&);                                            \
  template Matrix<T> delta_weight(const AdapterLayer<T>&);                                     \
  template Matrix<T> merge(const AdapterLayer<T>&);                                            \
  template void merge_into(Matrix<T>&, const AdapterLayer<T>&, T);

SBORA_INSTANTIATE_ADAPTER(float)
SBORA_INSTANTIATE_ADAPTER(double)

#undef SBORA_INSTANTIATE_ADAPTER

}  // namespace sbora
