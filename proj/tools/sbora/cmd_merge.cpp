// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <ostream>

#include "sbora/checkpoint.hpp"
#include "sbora/commands.hpp"
#include "sbora/compose.hpp"
#include "sbora/errors.hpp"
#include "sbora/report.hpp"

namespace sbora::cli {
namespace {

template <typename T>
bool same_bits(T a, T b) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  return std::bit_cast<U>(a) == std::bit_cast<U>(b);
}

template <typename T>
int merge_as(const RunConfig& cfg, const std::vector<std::string>& paths,
             const std::vector<double>& lambdas, std::ostream& out, std::ostream& err) {
  const auto w0 = share(load_base<T>(std::filesystem::path(cfg.text("base"))));
  const std::size_t d = w0->rows();
  const std::size_t k = w0->cols();

  std::vector<WeightedAdapter<T>> adapters;
  auto report = report_header(cfg);
  report["d"] = d;
  report["k"] = k;
  report["adapters"] = nlohmann::ordered_json::array();
  std::vector<char> region(d * k, 0);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    AdapterLayer<T> layer = [&] {
      try {
        return load_adapter<T>(std::filesystem::path(paths[i]), w0);
      } catch (const DimensionError& e) {
        throw DimensionError(paths[i] + ": " + e.what());
      }
    }();
    nlohmann::ordered_json a;
    a["path"] = paths[i];
    a["method"] = to_string(layer.kind());
    a["r"] = layer.r();
    a["lambda"] = lambdas[i];
    double fraction = 1.0;
    if (layer.kind() == AdapterKind::lora) {
      a["region"] = "all";
      std::fill(region.begin(), region.end(), 1);
    } else {
      const auto& basis = *layer.basis();
      const bool columns = layer.kind() == AdapterKind::sbora_fa;
      a["region"] = columns ? "columns" : "rows";
      a["indices"] = std::vector<std::uint32_t>(basis.indices().begin(), basis.indices().end());
      fraction = static_cast<double>(basis.rank()) / static_cast<double>(columns ? k : d);
      for (auto idx : basis.indices())
        for (std::size_t t = 0; t < (columns ? d : k); ++t)
          region[columns ? t * k + idx : idx * k + t] = 1;
    }
    a["updated_fraction"] = fraction;
    report["adapters"].push_back(a);
    adapters.push_back({std::move(layer), static_cast<T>(lambdas[i])});
  }

  const CombinedModel<T> model(w0, std::move(adapters));
  const auto merged = merge_all(model);
  save_base(std::filesystem::path(cfg.text("out")), merged);

  std::size_t changed = 0;
  for (std::size_t i = 0; i < merged.size(); ++i)
    changed += same_bits(merged.values()[i], w0->values()[i]) ? 0 : 1;
  const auto in_region = static_cast<std::size_t>(std::count(region.begin(), region.end(), 1));
  const double total = static_cast<double>(d * k);
  report["region_fraction"] = static_cast<double>(in_region) / total;
  report["entries_changed"] = changed;
  report["entries_changed_fraction"] = static_cast<double>(changed) / total;
  emit_json(report, cfg.text("report"), out);
  err << "sbora merge: region covers " << format_double(100.0 * in_region / total)
      << "% of W0, " << changed << " entries changed\n";
  return kExitOk;
}

}  // namespace

std::vector<KeySpec> merge_schema() {
  return {
      {"base", KeyType::text, "", "base checkpoint (W0)"},
      {"adapters", KeyType::list, "", "adapter checkpoints, merged in list order"},
      {"lambdas", KeyType::list, "", "one weight per adapter (default 1 each)"},
      {"out", KeyType::text, "merged.sbora", "merged weight file"},
      {"report", KeyType::text, "", "JSON report path (stdout when empty)"},
  };
}

int run_merge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_input("base", cfg.text("base"));
  const auto paths = cfg.list("adapters");
  for (const auto& p : paths) require_input("adapters", p);
  std::vector<double> lambdas;
  for (const auto& v : cfg.list("lambdas")) lambdas.push_back(parse_f64(v, "lambdas"));
  if (lambdas.empty()) lambdas.assign(paths.size(), 1.0);
  if (lambdas.size() != paths.size())
    throw ConfigError("lambdas: " + std::to_string(lambdas.size()) + " values for " +
                      std::to_string(paths.size()) + " adapters");
  if (cfg.text("out").empty()) throw ConfigError("out is required");

  try {
    const auto header = read_checkpoint_header(std::filesystem::path(cfg.text("base")));
    if (header.kind != kBaseKind) throw FormatError("base: not a base-weight checkpoint");
    return header.precision == Precision::f32 ? merge_as<float>(cfg, paths, lambdas, out, err)
                                              : merge_as<double>(cfg, paths, lambdas, out, err);
  } catch (const OrthogonalityError& e) {
    err << "sbora merge: orthogonality violation: " << e.what() << "\n";
  } catch (const DimensionError& e) {
    err << "sbora merge: shape mismatch: " << e.what() << "\n";
  }
  return kExitFailed;
}

}  // namespace sbora::cli
