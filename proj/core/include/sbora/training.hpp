// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbora/adapter.hpp"
#include "sbora/op_counters.hpp"

namespace sbora {

enum class TaskKind {
  teacher_student_columns,  ///< teacher - W0 supported on r columns
  teacher_student_rows,     ///< teacher - W0 supported on r rows
  dense_teacher,            ///< teacher - W0 dense
};

std::string_view to_string(TaskKind kind);
/// Accepts "columns", "rows", "dense". Throws std::invalid_argument.
TaskKind parse_task_kind(std::string_view name);

/// Regression target y = teacher x + noise * N(0, 1), x ~ N(0, I).
///
/// W0 has N(0, 1/k) entries. The teacher equals W0 except on the support:
/// for the column/row variants the delta entries on the r support columns
/// (rows) are N(0, 1/r) (N(0, 1/k)); the dense variant uses N(0, 1/k)
/// everywhere. A column task with r = k draws exactly the dense teacher.
template <typename T>
struct SyntheticTask {
  TaskKind kind = TaskKind::dense_teacher;
  std::shared_ptr<const Matrix<T>> w0;
  Matrix<T> teacher;
  std::optional<BasisIndexSet> support;  ///< columns or rows; empty for dense
  std::uint64_t seed = 0;
  double noise = 0.0;

  std::size_t d() const noexcept { return teacher.rows(); }
  std::size_t k() const noexcept { return teacher.cols(); }
};

template <typename T>
SyntheticTask<T> make_task(TaskKind kind, std::uint32_t d, std::uint32_t k, std::uint32_t r,
                           std::uint64_t seed, double noise);

/// n input rows and their (noisy) targets.
template <typename T>
struct Dataset {
  Matrix<T> x;  ///< n x k
  Matrix<T> y;  ///< n x d
};

template <typename T>
Dataset<T> sample_dataset(const SyntheticTask<T>& task, std::size_t n, std::uint64_t seed);

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  std::size_t steps = 1000;
  std::size_t batch = 32;
  double lr = 1e-2;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  /// 0: every step draws a fresh batch. n > 0: a fixed n-row training set
  /// (see training_dataset) is cycled through in order, `batch` rows per step.
  std::size_t dataset_size = 0;
};

template <typename T>
struct TrainTrace {
  std::vector<double> losses;             ///< batch MSE before each update
  std::vector<Matrix<T>> final_trainables;  ///< in AdapterLayer::trainables() order
  double wall_seconds = 0.0;              ///< informational only
  OpCounters forward_ops;                 ///< summed over all training forwards
};

/// The fixed training set used when cfg.dataset_size > 0.
template <typename T>
Dataset<T> training_dataset(const SyntheticTask<T>& task, const TrainConfig& cfg);

/// Minimizes the batch MSE of forward(layer, x) against the task targets.
/// Only the trainable factors change. Throws TrainingDivergedError on a
/// non-finite loss, DimensionError when layer and task disagree and
/// std::invalid_argument on a non-positive batch or learning rate.
template <typename T>
TrainTrace<T> train(AdapterLayer<T>& layer, const SyntheticTask<T>& task, const TrainConfig& cfg);

/// mean((forward(layer, x) - y)^2) over all entries.
template <typename T>
double dataset_mse(const AdapterLayer<T>& layer, const Dataset<T>& data);

/// Monte-Carlo MSE on n fresh noisy samples drawn with `seed`.
template <typename T>
double eval(const AdapterLayer<T>& layer, const SyntheticTask<T>& task, std::size_t n,
            std::uint64_t seed);

/// "step,loss" rows, losses printed in shortest round-trip form.
template <typename T>
std::string trace_to_csv(const TrainTrace<T>& trace);

}  // namespace sbora
