// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbora {

template <typename T>
std::vector<const Matrix<T>*> GradientBundle<T>::in_trainable_order() const {
  std::vector<const Matrix<T>*> out;
  if (kind != AdapterKind::sbora_fa) out.push_back(&grad_a);
  if (kind != AdapterKind::sbora_fb) out.push_back(&grad_b);
  return out;
}

namespace {

// out(i, j) = scale * sum_n left(n, i) * right(n, j)
template <typename T>
Matrix<T> batch_outer(const Matrix<T>& left, const Matrix<T>& right, T scale) {
  Matrix<T> out(left.cols(), right.cols());
  for (std::size_t n = 0; n < left.rows(); ++n) {
    auto l = left.row(n);
    auto r = right.row(n);
    for (std::size_t i = 0; i < l.size(); ++i) {
      const T li = l[i];
      auto o = out.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) o[j] += li * r[j];
    }
  }
  if (scale != T(1)) {
    for (T& v : out.values()) v *= scale;
  }
  return out;
}

}  // namespace

template <typename T>
GradientBundle<T> backward(const AdapterLayer<T>& layer, const Activation<T>& x,
                           const Activation<T>& upstream) {
  if (x.cols() != layer.k()) {
    throw DimensionError("backward: input has " + std::to_string(x.cols()) +
                         " features, layer expects k=" + std::to_string(layer.k()));
  }
  if (upstream.cols() != layer.d() || upstream.rows() != x.rows()) {
    throw DimensionError("backward: upstream is " + shape_string(upstream) + ", expected " +
                         shape_string(x.rows(), layer.d()));
  }
  GradientBundle<T> g;
  g.kind = layer.kind();
  const std::size_t batch = x.rows();
  const std::size_t r = layer.r();

  switch (layer.kind()) {
    case AdapterKind::sbora_fa: {
      const auto& basis = *layer.basis();
      Matrix<T> gathered(batch, r);
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t p = 0; p < r; ++p) gathered(n, p) = x(n, basis[p]);
      }
      g.grad_b = batch_outer(upstream, gathered, layer.scale());
      break;
    }
    case AdapterKind::sbora_fb: {
      const auto& basis = *layer.basis();
      Matrix<T> picked(batch, r);
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t p = 0; p < r; ++p) picked(n, p) = upstream(n, basis[p]);
      }
      g.grad_a = batch_outer(picked, x, layer.scale());
      break;
    }
    case AdapterKind::lora: {
      const auto& a = layer.a();
      const auto& b = layer.b();
      Matrix<T> z(batch, r);   // x A^T
      Matrix<T> gz(batch, r);  // upstream B
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t p = 0; p < r; ++p) {
          T acc = 0;
          for (std::size_t j = 0; j < layer.k(); ++j) acc += a(p, j) * x(n, j);
          z(n, p) = acc;
          T acc2 = 0;
          for (std::size_t i = 0; i < layer.d(); ++i) acc2 += upstream(n, i) * b(i, p);
          gz(n, p) = acc2;
        }
      }
      g.grad_b = batch_outer(upstream, z, layer.scale());
      g.grad_a = batch_outer(gz, x, layer.scale());
      break;
    }
  }
  return g;
}

double SumLoss::value(const Activation<double>& h) const {
  double s = 0.0;
  for (double v : h.values()) s += v;
  return s;
}

Activation<double> SumLoss::gradient(const Activation<double>& h) const {
  Activation<double> g(h.rows(), h.cols());
  g.fill(1.0);
  return g;
}

double MeanSquaredErrorLoss::value(const Activation<double>& h) const {
  if (!h.same_shape(target_)) throw DimensionError("MeanSquaredErrorLoss: shape mismatch");
  if (h.empty()) return 0.0;
  double s = 0.0;
  auto hv = h.values();
  auto tv = target_.values();
  for (std::size_t i = 0; i < hv.size(); ++i) {
    const double e = hv[i] - tv[i];
    s += e * e;
  }
  return s / static_cast<double>(hv.size());
}

Activation<double> MeanSquaredErrorLoss::gradient(const Activation<double>& h) const {
  if (!h.same_shape(target_)) throw DimensionError("MeanSquaredErrorLoss: shape mismatch");
  Activation<double> g(h.rows(), h.cols());
  if (h.empty()) return g;
  const double c = 2.0 / static_cast<double>(h.size());
  auto hv = h.values();
  auto tv = target_.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < hv.size(); ++i) gv[i] = c * (hv[i] - tv[i]);
  return g;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport finite_diff_check(const AdapterLayer<double>& layer, const Activation<double>& x,
                                  const OutputLoss& loss, double eps, double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_check: eps must be positive");
  if (tol < 0.0) throw std::invalid_argument("finite_diff_check: tol must be non-negative");

  auto eval = [&](const AdapterLayer<double>& l) {
    const double v = loss.value(forward(l, x));
    if (!std::isfinite(v)) throw NumericError("finite_diff_check: loss is not finite");
    return v;
  };

  eval(layer);
  const auto grads = backward(layer, x, loss.gradient(forward(layer, x)));
  const auto analytic = grads.in_trainable_order();

  GradCheckReport report;
  report.tolerance = tol;
  AdapterLayer<double> probe = layer;
  auto params = probe.trainables();
  for (std::size_t m = 0; m < params.size(); ++m) {
    Matrix<double>& p = *params[m];
    const char* name = (probe.kind() == AdapterKind::lora && m == 1) ||
                               probe.kind() == AdapterKind::sbora_fa
                           ? "B"
                           : "A";
    for (std::size_t i = 0; i < p.rows(); ++i) {
      for (std::size_t j = 0; j < p.cols(); ++j) {
        const double saved = p(i, j);
        p(i, j) = saved + eps;
        const double up = eval(probe);
        p(i, j) = saved - eps;
        const double down = eval(probe);
        p(i, j) = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double a = (*analytic[m])(i, j);
        const double err = relative_error(a, numeric);
        ++report.entries_checked;
        if (report.worst_param.empty() || err > report.max_rel_err) {
          report.max_rel_err = err;
          report.worst_param = name;
          report.worst_row = i;
          report.worst_col = j;
          report.worst_analytic = a;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

template struct GradientBundle<float>;
template struct GradientBundle<double>;
template GradientBundle<float> backward(const AdapterLayer<float>&, const Activation<float>&,
                                        const Activation<float>&);
template GradientBundle<double> backward(const AdapterLayer<double>&, const Activation<double>&,
                                         const Activation<double>&);

}  // namespace sbora
