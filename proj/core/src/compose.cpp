// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/compose.hpp"

#include <stdexcept>
#include <string>

namespace sbora {

template <typename T>
void require_disjoint(const std::vector<WeightedAdapter<T>>& adapters) {
  for (std::size_t p = 0; p < adapters.size(); ++p) {
    const auto& lp = adapters[p].layer;
    if (lp.kind() == AdapterKind::lora) continue;
    for (std::size_t q = p + 1; q < adapters.size(); ++q) {
      const auto& lq = adapters[q].layer;
      if (lq.kind() != lp.kind()) continue;
      if (!orthogonality_check(*lp.basis(), *lq.basis())) {
        throw OrthogonalityError("adapters " + std::to_string(p) + " and " + std::to_string(q) +
                                 " (" + std::string(to_string(lp.kind())) +
                                 ") share basis indices; their projections are not orthogonal");
      }
    }
  }
}

template <typename T>
CombinedModel<T>::CombinedModel(std::shared_ptr<const Matrix<T>> w0,
                                std::vector<WeightedAdapter<T>> adapters)
    : w0_(std::move(w0)), adapters_(std::move(adapters)) {
  if (!w0_) throw std::invalid_argument("CombinedModel: null base weight");
  for (std::size_t i = 0; i < adapters_.size(); ++i) {
    const auto& l = adapters_[i].layer;
    if (l.d() != w0_->rows() || l.k() != w0_->cols()) {
      throw DimensionError("CombinedModel: adapter " + std::to_string(i) + " is " +
                           shape_string(l.d(), l.k()) + ", base is " + shape_string(*w0_));
    }
  }
  require_disjoint(adapters_);
}

template <typename T>
Activation<T> combine_adapters(const CombinedModel<T>& model, const Activation<T>& x) {
  Activation<T> h = base_forward(model.w0(), x);
  for (const auto& wa : model.adapters()) accumulate_adapter(wa.layer, x, wa.lambda, h);
  return h;
}

template <typename T>
Matrix<T> merge_all(const CombinedModel<T>& model) {
  Matrix<T> w = model.w0();
  for (const auto& wa : model.adapters()) merge_into(w, wa.layer, wa.lambda);
  return w;
}

#define SBORA_INSTANTIATE_COMPOSE(T)                                                   \
  template class CombinedModel<T>;                                                     \
  template void require_disjoint(const std::vector<WeightedAdapter<T>>&);              \
  template Activation<T> combine_adapters(const CombinedModel<T>&, const Activation<T>&); \
  template Matrix<T> merge_all(const CombinedModel<T>&);

SBORA_INSTANTIATE_COMPOSE(float)
SBORA_INSTANTIATE_COMPOSE(double)

#undef SBORA_INSTANTIATE_COMPOSE

}  // namespace sbora
