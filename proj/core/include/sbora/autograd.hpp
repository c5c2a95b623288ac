// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "sbora/adapter.hpp"

namespace sbora {

/// Gradients for the trainable factors of one layer. There is deliberately no
/// slot for W0 or the basis indices: they are frozen. A factor the kind does
/// not train is left empty (0 x 0).
template <typename T>
struct GradientBundle {
  AdapterKind kind = AdapterKind::lora;
  Matrix<T> grad_a;  ///< r x k for lora and sbora-fb
  Matrix<T> grad_b;  ///< d x r for lora and sbora-fa

  /// Gradients in the order of AdapterLayer::trainables().
  std::vector<const Matrix<T>*> in_trainable_order() const;
};

/// Hand-derived gradients of a scalar loss L given upstream = dL/dh
/// (batch x d), summed over the batch.
///
///   sbora-fa: dL/dB = scale * upstream^T x[:, basis]          (gather, no one-hot)
///   sbora-fb: dL/dA = scale * upstream[:, basis]^T x          (gather of upstream)
///   lora:     dL/dB = scale * upstream^T (x A^T)
///             dL/dA = scale * (upstream B)^T x
template <typename T>
GradientBundle<T> backward(const AdapterLayer<T>& layer, const Activation<T>& x,
                           const Activation<T>& upstream);

/// Scalar loss of a layer output, with its gradient with respect to that output.
class OutputLoss {
 public:
  virtual ~OutputLoss() = default;
  virtual double value(const Activation<double>& h) const = 0;
  virtual Activation<double> gradient(const Activation<double>& h) const = 0;
};

/// L = sum of all entries of h.
class SumLoss final : public OutputLoss {
 public:
  double value(const Activation<double>& h) const override;
  Activation<double> gradient(const Activation<double>& h) const override;
};

/// L = mean over all entries of (h - target)^2.
class MeanSquaredErrorLoss final : public OutputLoss {
 public:
  explicit MeanSquaredErrorLoss(Activation<double> target) : target_(std::move(target)) {}
  double value(const Activation<double>& h) const override;
  Activation<double> gradient(const Activation<double>& h) const override;

 private:
  Activation<double> target_;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t entries_checked = 0;
  // Worst offender.
  std::string worst_param;  ///< "A" or "B"; empty when nothing was checked
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// |a - n| / max(|a|, |n|, 1e-12)
double relative_error(double analytic, double numeric);

/// Compares backward() against central differences of loss(forward(layer, x))
/// over every trainable entry. Perturbs a private copy of the trainable factors
/// only. Throws NumericError when the loss is non-finite and
/// std::invalid_argument when eps <= 0.
GradCheckReport finite_diff_check(const AdapterLayer<double>& layer, const Activation<double>& x,
                                  const OutputLoss& loss, double eps = 1e-5, double tol = 1e-4);

}  // namespace sbora
