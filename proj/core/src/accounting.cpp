// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/accounting.hpp"

#include <nlohmann/json.hpp>

#include "sbora/rng.hpp"

namespace sbora {
namespace {

void validate(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r) {
  if (d == 0 || k == 0) throw DimensionError("cost model: d and k must be positive");
  if (r == 0) throw InvalidRankError("invalid rank 0 (need r >= 1)");
  if (method == AdapterKind::sbora_fa && r > k) {
    throw InvalidRankError("invalid rank " + std::to_string(r) + " > k=" + std::to_string(k));
  }
  if (method == AdapterKind::sbora_fb && r > d) {
    throw InvalidRankError("invalid rank " + std::to_string(r) + " > d=" + std::to_string(d));
  }
}

}  // namespace

CostReport analytic_params(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r) {
  validate(method, d, k, r);
  CostReport c{method, d, k, r};
  switch (method) {
    case AdapterKind::lora:
      c.trainable_params = (k + d) * r;
      c.total_params = (k + d) * r;
      break;
    case AdapterKind::sbora_fa:
      c.trainable_params = d * r;
      c.total_params = d * r + r;
      break;
    case AdapterKind::sbora_fb:
      c.trainable_params = k * r;
      c.total_params = k * r + r;
      break;
  }
  c.gradient_values = c.trainable_params;
  return c;
}

CostReport analytic_flops(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r,
                          std::uint64_t batch) {
  validate(method, d, k, r);
  CostReport c{method, d, k, r};
  std::uint64_t mults = d * k;
  std::uint64_t adds = d * (k - 1);
  switch (method) {
    case AdapterKind::lora:
      mults += r * k + d * r;
      adds += r * (k - 1) + d * (r - 1) + d;
      break;
    case AdapterKind::sbora_fa:
      mults += d * r;
      adds += d * (r - 1) + d;
      break;
    case AdapterKind::sbora_fb:
      mults += r * k;
      adds += r * (k - 1) + r;
      break;
  }
  c.mults = mults * batch;
  c.adds = adds * batch;
  return c;
}

CostReport analytic_cost(AdapterKind method, std::uint64_t d, std::uint64_t k, std::uint64_t r) {
  CostReport c = analytic_params(method, d, k, r);
  const CostReport f = analytic_flops(method, d, k, r);
  c.mults = f.mults;
  c.adds = f.adds;
  return c;
}

template <typename T>
OpCounters measured_cost(const AdapterLayer<T>& layer, const Activation<T>& x) {
  OpCounters counters;
  (void)forward(layer, x, counters);
  return counters;
}

OpCounters measured_cost(AdapterKind method, std::uint32_t d, std::uint32_t k, std::uint32_t r,
                         std::uint64_t batch, std::uint64_t seed) {
  validate(method, d, k, r);
  Rng rng(seed);
  auto fill = [&rng](Matrix<double>& m) {
    for (double& v : m.values()) v = rng.normal();
  };
  Matrix<double> w0(d, k);
  fill(w0);
  auto base = share(std::move(w0));
  Activation<double> x(batch, k);
  fill(x);
  switch (method) {
    case AdapterKind::lora: {
      Matrix<double> a(r, k), b(d, r);
      fill(a);
      fill(b);
      return measured_cost(AdapterLayer<double>::lora(base, std::move(a), std::move(b)), x);
    }
    case AdapterKind::sbora_fa: {
      Matrix<double> b(d, r);
      fill(b);
      auto basis = sample_basis_indices(k, r, Rng::derive(seed, 1));
      return measured_cost(AdapterLayer<double>::sbora_fa(base, std::move(basis), std::move(b)), x);
    }
    case AdapterKind::sbora_fb: {
      Matrix<double> a(r, k);
      fill(a);
      auto basis = sample_basis_indices(d, r, Rng::derive(seed, 1));
      return measured_cost(AdapterLayer<double>::sbora_fb(base, std::move(basis), std::move(a)), x);
    }
  }
  return {};
}

std::string to_json(const CostReport& c) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(c.method));
  j["d"] = c.d;
  j["k"] = c.k;
  j["r"] = c.r;
  j["trainable_params"] = c.trainable_params;
  j["total_params"] = c.total_params;
  j["gradient_values"] = c.gradient_values;
  j["mults"] = c.mults;
  j["adds"] = c.adds;
  return j.dump();
}

std::string cost_csv_header() { return "method,d,k,r,trainable,total,grad,mults,adds"; }

std::string cost_csv_row(const CostReport& c) {
  return std::string(to_string(c.method)) + "," + std::to_string(c.d) + "," + std::to_string(c.k) +
         "," + std::to_string(c.r) + "," + std::to_string(c.trainable_params) + "," +
         std::to_string(c.total_params) + "," + std::to_string(c.gradient_values) + "," +
         std::to_string(c.mults) + "," + std::to_string(c.adds);
}

template OpCounters measured_cost(const AdapterLayer<float>&, const Activation<float>&);
template OpCounters measured_cost(const AdapterLayer<double>&, const Activation<double>&);

}  // namespace sbora
