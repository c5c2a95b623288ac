// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "sbora/config.hpp"

namespace sbora::cli {

// Each command returns an exit code; ConfigError escapes as a usage error.

std::vector<KeySpec> gradcheck_schema();
int run_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::vector<KeySpec> train_schema();
int run_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::vector<KeySpec> bench_schema();
int run_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::vector<KeySpec> merge_schema();
int run_merge(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::vector<KeySpec> quantize_schema();
int run_quantize(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sbora::cli

#include <cstdint>
#include <string>

#include "sbora/adapter.hpp"

namespace sbora::cli {

/// Typed accessors shared by the commands; all failures are ConfigError.
AdapterKind method_arg(const RunConfig& cfg, const std::string& key);
/// "all" expands to lora, fa, fb.
std::vector<AdapterKind> methods_arg(const RunConfig& cfg, const std::string& key);
std::uint32_t dim_arg(const RunConfig& cfg, const std::string& key);
/// InvalidRankError/DimensionError from the cost model become ConfigError.
void require_valid_rank(AdapterKind kind, std::uint32_t d, std::uint32_t k, std::uint32_t r);

}  // namespace sbora::cli
