// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <ostream>

#include "sbora/autograd.hpp"
#include "sbora/commands.hpp"
#include "sbora/report.hpp"
#include "sbora/rng.hpp"

namespace sbora::cli {
namespace {

Matrix<double> gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix<double> m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

// Every factor is drawn non-zero so both gradients are exercised.
AdapterLayer<double> random_layer(AdapterKind kind, std::uint32_t d, std::uint32_t k,
                                  std::uint32_t r, double scale, Rng& rng) {
  auto w0 = share(gaussian(d, k, rng));
  switch (kind) {
    case AdapterKind::lora: {
      auto a = gaussian(r, k, rng);
      return AdapterLayer<double>::lora(w0, std::move(a), gaussian(d, r, rng), scale);
    }
    case AdapterKind::sbora_fa: {
      auto basis = sample_basis_indices(k, r, rng.next_u64());
      return AdapterLayer<double>::sbora_fa(w0, std::move(basis), gaussian(d, r, rng), scale);
    }
    case AdapterKind::sbora_fb: {
      auto basis = sample_basis_indices(d, r, rng.next_u64());
      return AdapterLayer<double>::sbora_fb(w0, std::move(basis), gaussian(r, k, rng), scale);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<KeySpec> gradcheck_schema() {
  return {
      {"method", KeyType::list, "all", "lora, fa, fb or all"},
      {"d", KeyType::integer, "6", "output features"},
      {"k", KeyType::integer, "5", "input features"},
      {"r", KeyType::integer, "2", "adapter rank"},
      {"batch", KeyType::integer, "3", "input rows per instance"},
      {"instances", KeyType::integer, "100", "random instances per method"},
      {"seed", KeyType::integer, "0", "base seed"},
      {"scale", KeyType::real, "1", "adapter scale"},
      {"eps", KeyType::real, "1e-5", "central-difference step"},
      {"tol", KeyType::real, "1e-4", "max relative error"},
      {"out", KeyType::text, "", "JSON report path (stdout when empty)"},
  };
}

int run_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const auto kinds = methods_arg(cfg, "method");
  const auto d = dim_arg(cfg, "d");
  const auto k = dim_arg(cfg, "k");
  const auto r = dim_arg(cfg, "r");
  const auto batch = cfg.positive("batch");
  const auto instances = cfg.integer("instances");
  const auto seed = cfg.integer("seed");
  const double scale = cfg.real("scale");
  const double eps = cfg.real("eps");
  const double tol = cfg.real("tol");
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  if (tol < 0.0) throw ConfigError("tol must be non-negative");
  if (kinds.empty()) throw ConfigError("method: nothing to check");
  for (auto kind : kinds) require_valid_rank(kind, d, k, r);

  auto report = report_header(cfg);
  report["results"] = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (auto kind : kinds) {
    double worst = 0.0;
    std::size_t entries = 0;
    bool pass = true;
    nlohmann::ordered_json worst_entry = nullptr;
    for (std::uint64_t i = 0; i < instances; ++i) {
      Rng rng(Rng::derive(Rng::derive(seed, static_cast<std::uint64_t>(kind)), i));
      const auto layer = random_layer(kind, d, k, r, scale, rng);
      const auto x = gaussian(batch, k, rng);
      const MeanSquaredErrorLoss loss(gaussian(batch, d, rng));
      const auto rep = finite_diff_check(layer, x, loss, eps, tol);
      entries += rep.entries_checked;
      pass = pass && rep.pass;
      if (worst_entry.is_null() || rep.max_rel_err > worst) {
        worst = rep.max_rel_err;
        worst_entry = {{"instance", i},          {"param", rep.worst_param},
                       {"row", rep.worst_row},   {"col", rep.worst_col},
                       {"analytic", rep.worst_analytic}, {"numeric", rep.worst_numeric}};
      }
    }
    all_pass = all_pass && pass;
    nlohmann::ordered_json row;
    row["method"] = to_string(kind);
    row["instances"] = instances;
    row["entries_checked"] = entries;
    row["max_rel_err"] = worst;
    row["pass"] = pass;
    row["worst"] = worst_entry;
    report["results"].push_back(row);
  }
  report["pass"] = all_pass;
  emit_json(report, cfg.text("out"), out);
  return all_pass ? kExitOk : kExitFailed;
}

}  // namespace sbora::cli
