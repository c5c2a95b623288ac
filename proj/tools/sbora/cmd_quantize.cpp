// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <ostream>

#include "sbora/checkpoint.hpp"
#include "sbora/commands.hpp"
#include "sbora/errors.hpp"
#include "sbora/quant.hpp"
#include "sbora/report.hpp"

namespace sbora::cli {

std::vector<KeySpec> quantize_schema() {
  return {
      {"in", KeyType::text, "", "base checkpoint to quantize"},
      {"out", KeyType::text, "base.sbq4", "NF4 output file"},
      {"block_size", KeyType::integer, "64", "weights per absmax block"},
      {"dequant_out", KeyType::text, "", "optional base checkpoint of the dequantized weights"},
      {"report", KeyType::text, "", "JSON report path (stdout when empty)"},
  };
}

int run_quantize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_input("in", cfg.text("in"));
  if (cfg.text("out").empty()) throw ConfigError("out is required");
  const auto block = cfg.positive("block_size");

  const auto w = load_base<double>(std::filesystem::path(cfg.text("in")));
  QuantizedMatrix q = [&] {
    try {
      return quantize(w, block);
    } catch (const NumericError& e) {
      err << "sbora quantize: " << e.what() << "\n";
      throw;
    }
  }();
  save_quantized(std::filesystem::path(cfg.text("out")), q);
  const auto back = dequantize<double>(q);
  if (!cfg.text("dequant_out").empty())
    save_base(std::filesystem::path(cfg.text("dequant_out")), back);

  // Per-entry bound: half the widest codebook gap times the block scale.
  const double half_gap = nf4_max_gap() / 2.0;
  double max_err = 0.0;
  double sq = 0.0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = std::abs(w.values()[i] - back.values()[i]);
    max_err = std::max(max_err, e);
    sq += e * e;
    violations += e <= q.absmax()[i / block] * half_gap ? 0 : 1;
  }
  const bool idempotent = quantize(back, block) == q;

  auto report = report_header(cfg);
  report["rows"] = q.rows();
  report["cols"] = q.cols();
  report["blocks"] = q.absmax().size();
  report["max_abs_error"] = max_err;
  report["rmse"] = w.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(w.size()));
  report["bound_violations"] = violations;
  report["idempotent"] = idempotent;
  const bool pass = violations == 0 && idempotent;
  report["pass"] = pass;
  emit_json(report, cfg.text("report"), out);
  return pass ? kExitOk : kExitFailed;
}

}  // namespace sbora::cli
