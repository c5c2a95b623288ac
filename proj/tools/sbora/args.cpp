// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>

#include "sbora/accounting.hpp"
#include "sbora/commands.hpp"
#include "sbora/errors.hpp"

namespace sbora::cli {

AdapterKind method_arg(const RunConfig& cfg, const std::string& key) {
  try {
    return parse_adapter_kind(cfg.text(key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<AdapterKind> methods_arg(const RunConfig& cfg, const std::string& key) {
  std::vector<AdapterKind> kinds;
  for (const auto& name : cfg.list(key)) {
    if (name == "all") {
      kinds.insert(kinds.end(), {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb});
      continue;
    }
    try {
      kinds.push_back(parse_adapter_kind(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return kinds;
}

std::uint32_t dim_arg(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.positive(key);
  if (v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(key + " is too large");
  return static_cast<std::uint32_t>(v);
}

void require_valid_rank(AdapterKind kind, std::uint32_t d, std::uint32_t k, std::uint32_t r) {
  try {
    (void)analytic_params(kind, d, k, r);
  } catch (const InvalidRankError& e) {
    throw ConfigError(e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace sbora::cli
