// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <ostream>

#include "sbora/checkpoint.hpp"
#include "sbora/commands.hpp"
#include "sbora/errors.hpp"
#include "sbora/report.hpp"
#include "sbora/rng.hpp"
#include "sbora/training.hpp"

namespace sbora::cli {
namespace {

constexpr std::uint64_t kBasisStream = 20;
constexpr std::uint64_t kInitStream = 21;
constexpr std::uint64_t kEvalStream = 30;

template <typename T>
AdapterLayer<T> initial_layer(AdapterKind kind, const SyntheticTask<T>& task,
                                   std::uint32_t r, const std::string& basis_mode,
                                   std::uint64_t seed, double scale) {
  const auto d = static_cast<std::uint32_t>(task.d());
  const auto k = static_cast<std::uint32_t>(task.k());
  if (kind == AdapterKind::lora)
    return AdapterLayer<T>::lora(task.w0, r, Rng::derive(seed, kInitStream), static_cast<T>(scale));

  const bool columns = kind == AdapterKind::sbora_fa;
  const bool same_side = (columns && task.kind == TaskKind::teacher_student_columns) ||
                         (!columns && task.kind == TaskKind::teacher_student_rows);
  std::optional<BasisIndexSet> basis;
  if (basis_mode == "matched") {
    if (!same_side || !task.support)
      throw ConfigError("basis=matched needs task=columns for fa or task=rows for fb");
    if (task.support->rank() != r) throw ConfigError("basis=matched: task rank differs from r");
    basis = *task.support;
  } else if (basis_mode == "random") {
    basis = sample_basis_indices(columns ? k : d, r, Rng::derive(seed, kBasisStream));
  } else {
    throw ConfigError("basis: expected matched or random, got '" + basis_mode + "'");
  }
  return columns ? AdapterLayer<T>::sbora_fa(task.w0, *basis, static_cast<T>(scale))
                 : AdapterLayer<T>::sbora_fb(task.w0, *basis, static_cast<T>(scale));
}

std::vector<std::uint32_t> index_list(const BasisIndexSet& s) {
  return {s.indices().begin(), s.indices().end()};
}

struct TrainSetup {
  AdapterKind kind;
  TaskKind task_kind;
  std::uint32_t d, k, r;
  std::uint64_t seed;
  double noise;
  TrainConfig tc;
  std::uint64_t eval_samples;
  std::filesystem::path dir;
};

template <typename T>
int train_as(const RunConfig& cfg, const TrainSetup& s, std::ostream& out, std::ostream& err) {
  const auto& [kind, task_kind, d, k, r, seed, noise, tc, eval_samples, dir] = s;
  SyntheticTask<T> task;
  try {
    // Dense tasks have no support, so r only sizes the adapter there.
    task = make_task<T>(task_kind, d, k, task_kind == TaskKind::dense_teacher ? 1 : r, seed, noise);
  } catch (const InvalidRankError& e) {
    throw ConfigError(e.what());
  }
  auto layer = initial_layer(kind, task, r, cfg.text("basis"), seed, cfg.real("scale"));

  TrainTrace<T> trace;
  try {
    trace = train(layer, task, tc);
  } catch (const TrainingDivergedError& e) {
    err << "sbora train: diverged: " << e.what() << "\n";
    return kExitFailed;
  }
  err << "sbora train: " << tc.steps << " steps in " << trace.wall_seconds << " s\n";

  std::filesystem::create_directories(dir);
  write_file(dir / "trace.csv", trace_to_csv(trace));
  save_adapter(dir / "adapter.sbora", layer);
  save_base(dir / "base.sbora", *task.w0);

  auto summary = report_header(cfg);
  summary["method"] = to_string(kind);
  summary["steps_run"] = trace.losses.size();
  summary["final_loss"] = trace.losses.empty() ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(trace.losses.back());
  summary["final_mse"] = eval(layer, task, eval_samples, Rng::derive(seed, kEvalStream));
  if (tc.dataset_size > 0) summary["train_set_mse"] = dataset_mse(layer, training_dataset(task, tc));
  if (layer.basis()) summary["basis"] = index_list(*layer.basis());
  if (task.support) summary["task_support"] = index_list(*task.support);
  summary["trainable_params"] = layer.trainable_count();
  summary["forward_mults"] = trace.forward_ops.mults;
  summary["forward_adds"] = trace.forward_ops.adds;
  summary["files"] = {"trace.csv", "summary.json", "adapter.sbora", "base.sbora"};
  emit_json(summary, (dir / "summary.json").string(), out);
  out << "final_mse " << format_double(summary["final_mse"].get<double>()) << "\n";
  return kExitOk;
}


}  // namespace

std::vector<KeySpec> train_schema() {
  return {
      {"method", KeyType::text, "fa", "lora, fa or fb"},
      {"task", KeyType::text, "columns", "columns, rows or dense teacher"},
      {"d", KeyType::integer, "8", "output features"},
      {"k", KeyType::integer, "8", "input features"},
      {"r", KeyType::integer, "2", "adapter rank (and teacher support size)"},
      {"basis", KeyType::text, "matched", "matched (teacher support) or random"},
      {"seed", KeyType::integer, "0", "task, data and init seed"},
      {"noise", KeyType::real, "0", "target noise standard deviation"},
      {"steps", KeyType::integer, "2000", "optimizer steps"},
      {"batch", KeyType::integer, "32", "rows per step"},
      {"dataset_size", KeyType::integer, "0", "fixed training set size (0: fresh batches)"},
      {"optimizer", KeyType::text, "adam", "adam or sgd"},
      {"lr", KeyType::real, "0.01", "learning rate"},
      {"scale", KeyType::real, "1", "adapter scale"},
      {"precision", KeyType::integer, "64", "32 or 64-bit arithmetic"},
      {"eval_samples", KeyType::integer, "4096", "fresh samples for final_mse"},
      {"out_dir", KeyType::text, "train_out", "directory for trace.csv, summary.json, *.sbora"},
  };
}

int run_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto kind = method_arg(cfg, "method");
  TaskKind task_kind;
  try {
    task_kind = parse_task_kind(cfg.text("task"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
  const auto d = dim_arg(cfg, "d");
  const auto k = dim_arg(cfg, "k");
  const auto r = dim_arg(cfg, "r");
  require_valid_rank(kind, d, k, r);
  const auto seed = cfg.integer("seed");
  const double noise = cfg.real("noise");
  if (noise < 0.0) throw ConfigError("noise must be non-negative");

  TrainConfig tc;
  tc.steps = cfg.integer("steps");
  tc.batch = cfg.positive("batch");
  tc.dataset_size = cfg.integer("dataset_size");
  tc.lr = cfg.real("lr");
  tc.seed = seed;
  if (tc.lr <= 0.0) throw ConfigError("lr must be positive");
  const auto& opt = cfg.text("optimizer");
  if (opt == "adam")
    tc.optimizer = OptimizerKind::adam;
  else if (opt == "sgd")
    tc.optimizer = OptimizerKind::sgd;
  else
    throw ConfigError("optimizer: expected adam or sgd, got '" + opt + "'");
  const auto eval_samples = cfg.positive("eval_samples");
  const std::filesystem::path dir = cfg.text("out_dir");
  if (dir.empty()) throw ConfigError("out_dir is required");
  const auto precision = cfg.integer("precision");
  if (precision != 32 && precision != 64) throw ConfigError("precision: expected 32 or 64");

  const TrainSetup s{kind, task_kind, d, k, r, seed, noise, tc, eval_samples, dir};
  return precision == 32 ? train_as<float>(cfg, s, out, err) : train_as<double>(cfg, s, out, err);
}


}  // namespace sbora::cli
