// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/training.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sbora/autograd.hpp"
#include "sbora/rng.hpp"

namespace sbora {
namespace {

// Sub-stream ids for Rng::derive.
enum Stream : std::uint64_t {
  kBaseStream = 0,
  kSupportStream = 1,
  kDeltaStream = 2,
  kDatasetStream = 10,
  kBatchStream = 11,
};

template <typename T>
double mse(const Activation<T>& h, const Matrix<T>& y) {
  if (h.empty()) return 0.0;
  double s = 0.0;
  auto hv = h.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < hv.size(); ++i) {
    const double e = static_cast<double>(hv[i]) - static_cast<double>(yv[i]);
    s += e * e;
  }
  return s / static_cast<double>(hv.size());
}

template <typename T>
void fill_batch(const SyntheticTask<T>& task, Rng& rng, Matrix<T>& x, Matrix<T>& y) {
  for (T& v : x.values()) v = static_cast<T>(rng.normal());
  y = base_forward(task.teacher, x);
  if (task.noise > 0.0) {
    for (T& v : y.values()) v += static_cast<T>(task.noise * rng.normal());
  }
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, std::size_t params) : cfg_(cfg) {
    if (cfg.optimizer == OptimizerKind::adam) {
      m_.assign(params, 0.0);
      v_.assign(params, 0.0);
    }
  }

  // Parameters are addressed as one flat vector across all trainable factors.
  template <typename T>
  void step(const std::vector<Matrix<T>*>& params, const std::vector<const Matrix<T>*>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::size_t offset = 0;
    for (std::size_t m = 0; m < params.size(); ++m) {
      auto p = params[m]->values();
      auto g = grads[m]->values();
      for (std::size_t i = 0; i < p.size(); ++i, ++offset) {
        const double gi = g[i];
        if (cfg_.optimizer == OptimizerKind::sgd) {
          p[i] = static_cast<T>(p[i] - cfg_.lr * gi);
          continue;
        }
        m_[offset] = cfg_.beta1 * m_[offset] + (1.0 - cfg_.beta1) * gi;
        v_[offset] = cfg_.beta2 * v_[offset] + (1.0 - cfg_.beta2) * gi * gi;
        const double mhat = m_[offset] / bc1;
        const double vhat = v_[offset] / bc2;
        p[i] = static_cast<T>(p[i] - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps));
      }
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t t_ = 0;
};

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::teacher_student_columns: return "columns";
    case TaskKind::teacher_student_rows: return "rows";
    case TaskKind::dense_teacher: return "dense";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "columns" || name == "teacher-student-columns") return TaskKind::teacher_student_columns;
  if (name == "rows" || name == "teacher-student-rows") return TaskKind::teacher_student_rows;
  if (name == "dense" || name == "dense-teacher") return TaskKind::dense_teacher;
  throw std::invalid_argument("unknown task '" + std::string(name) +
                              "' (expected columns, rows or dense)");
}

template <typename T>
SyntheticTask<T> make_task(TaskKind kind, std::uint32_t d, std::uint32_t k, std::uint32_t r,
                           std::uint64_t seed, double noise) {
  if (d == 0 || k == 0) throw DimensionError("make_task: d and k must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw std::invalid_argument("make_task: noise must be finite and >= 0");
  }
  SyntheticTask<T> task;
  task.kind = kind;
  task.seed = seed;
  task.noise = noise;

  Matrix<T> w0(d, k);
  {
    Rng rng(Rng::derive(seed, kBaseStream));
    const double sd = 1.0 / std::sqrt(static_cast<double>(k));
    for (T& v : w0.values()) v = static_cast<T>(sd * rng.normal());
  }
  task.teacher = w0;

  Rng delta(Rng::derive(seed, kDeltaStream));
  switch (kind) {
    case TaskKind::teacher_student_columns: {
      task.support = sample_basis_indices(k, r, Rng::derive(seed, kSupportStream));
      const double sd = 1.0 / std::sqrt(static_cast<double>(r));
      for (std::size_t i = 0; i < d; ++i) {
        for (std::uint32_t j : task.support->indices()) {
          task.teacher(i, j) += static_cast<T>(sd * delta.normal());
        }
      }
      break;
    }
    case TaskKind::teacher_student_rows: {
      task.support = sample_basis_indices(d, r, Rng::derive(seed, kSupportStream));
      const double sd = 1.0 / std::sqrt(static_cast<double>(k));
      for (std::uint32_t i : task.support->indices()) {
        for (std::size_t j = 0; j < k; ++j) task.teacher(i, j) += static_cast<T>(sd * delta.normal());
      }
      break;
    }
    case TaskKind::dense_teacher: {
      const double sd = 1.0 / std::sqrt(static_cast<double>(k));
      for (T& v : task.teacher.values()) v += static_cast<T>(sd * delta.normal());
      break;
    }
  }
  task.w0 = share(std::move(w0));
  return task;
}

template <typename T>
Dataset<T> sample_dataset(const SyntheticTask<T>& task, std::size_t n, std::uint64_t seed) {
  Dataset<T> data{Matrix<T>(n, task.k()), Matrix<T>(n, task.d())};
  Rng rng(seed);
  fill_batch(task, rng, data.x, data.y);
  return data;
}

template <typename T>
Dataset<T> training_dataset(const SyntheticTask<T>& task, const TrainConfig& cfg) {
  return sample_dataset(task, cfg.dataset_size, Rng::derive(cfg.seed, kDatasetStream));
}

template <typename T>
TrainTrace<T> train(AdapterLayer<T>& layer, const SyntheticTask<T>& task, const TrainConfig& cfg) {
  if (layer.d() != task.d() || layer.k() != task.k()) {
    throw DimensionError("train: layer is " + shape_string(layer.d(), layer.k()) + ", task is " +
                         shape_string(task.d(), task.k()));
  }
  if (cfg.batch == 0) throw std::invalid_argument("train: batch size must be positive");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");

  TrainTrace<T> trace;
  const auto start = std::chrono::steady_clock::now();
  if (cfg.steps > 0) {
    std::optional<Dataset<T>> fixed;
    if (cfg.dataset_size > 0) fixed = training_dataset(task, cfg);
    Rng batch_rng(Rng::derive(cfg.seed, kBatchStream));
    Optimizer opt(cfg, layer.trainable_count());
    Matrix<T> x(cfg.batch, task.k());
    Matrix<T> y(cfg.batch, task.d());
    std::size_t cursor = 0;
    trace.losses.reserve(cfg.steps);

    for (std::size_t step = 0; step < cfg.steps; ++step) {
      if (fixed) {
        for (std::size_t n = 0; n < cfg.batch; ++n) {
          auto xs = fixed->x.row(cursor);
          auto ys = fixed->y.row(cursor);
          std::copy(xs.begin(), xs.end(), x.row(n).begin());
          std::copy(ys.begin(), ys.end(), y.row(n).begin());
          cursor = (cursor + 1) % cfg.dataset_size;
        }
      } else {
        fill_batch(task, batch_rng, x, y);
      }

      const Activation<T> h = forward(layer, x, trace.forward_ops);
      const double loss = mse(h, y);
      if (!std::isfinite(loss)) {
        throw TrainingDivergedError(step, "training diverged: loss is " + std::to_string(loss) +
                                              " at step " + std::to_string(step));
      }
      trace.losses.push_back(loss);

      Activation<T> upstream(h.rows(), h.cols());
      const double c = 2.0 / static_cast<double>(h.size());
      auto uv = upstream.values();
      auto hv = h.values();
      auto yv = y.values();
      for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = static_cast<T>(c * (hv[i] - yv[i]));

      const GradientBundle<T> grads = backward(layer, x, upstream);
      opt.step(layer.trainables(), grads.in_trainable_order());
    }
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const Matrix<T>* m : std::as_const(layer).trainables()) trace.final_trainables.push_back(*m);
  return trace;
}

template <typename T>
double dataset_mse(const AdapterLayer<T>& layer, const Dataset<T>& data) {
  return mse(forward(layer, data.x), data.y);
}

template <typename T>
double eval(const AdapterLayer<T>& layer, const SyntheticTask<T>& task, std::size_t n,
            std::uint64_t seed) {
  return dataset_mse(layer, sample_dataset(task, n, seed));
}

template <typename T>
std::string trace_to_csv(const TrainTrace<T>& trace) {
  std::string out = "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.losses.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, trace.losses[i]);
    out += std::to_string(i);
    out += ',';
    out.append(buf, end);
    out += '\n';
  }
  return out;
}

#define SBORA_INSTANTIATE_TRAINING(T)                                                           \
  template struct SyntheticTask<T>;                                                             \
  template SyntheticTask<T> make_task<T>(TaskKind, std::uint32_t, std::uint32_t, std::uint32_t, \
                                         std::uint64_t, double);                                \
  template Dataset<T> sample_dataset(const SyntheticTask<T>&, std::size_t, std::uint64_t);      \
  template Dataset<T> training_dataset(const SyntheticTask<T>&, const TrainConfig&);            \
  template TrainTrace<T> train(AdapterLayer<T>&, const SyntheticTask<T>&, const TrainConfig&);  \
  template double dataset_mse(const AdapterLayer<T>&, const Dataset<T>&);                       \
  template double eval(const AdapterLayer<T>&, const SyntheticTask<T>&, std::size_t,            \
                       std::uint64_t);                                                          \
  template std::string trace_to_csv(const TrainTrace<T>&);

SBORA_INSTANTIATE_TRAINING(float)
SBORA_INSTANTIATE_TRAINING(double)

#undef SBORA_INSTANTIATE_TRAINING

}  // namespace sbora
