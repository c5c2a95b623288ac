// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
//   acceptance [path/to/sbora-cli]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sbora/sbora.hpp"

namespace fs = std::filesystem;
using namespace sbora;

namespace {

// Pinned tolerances and budgets.
constexpr int kEquivalenceInstances = 200;
constexpr double kEquivalenceBudgetSeconds = 10.0;
constexpr int kRegionalInstances = 100;
constexpr std::uint32_t kGridMax = 16;
constexpr int kGradcheckInstances = 100;
constexpr double kGradEps = 1e-5;
constexpr double kGradTol = 1e-4;
constexpr double kMatchedMseTarget = 1e-8;
constexpr std::size_t kMaxSteps = 2000;
constexpr double kFloorTol = 1e-6;
constexpr double kLearningBudgetSeconds = 30.0;
constexpr int kCompositionInstances = 50;
constexpr std::size_t kQuantBlocks = 1000;
constexpr std::size_t kQuantBlockSize = 64;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename T>
bool bitwise_equal(const Matrix<T>& a, const Matrix<T>& b) {
  if (!a.same_shape(b)) return false;
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<U>(a.values()[i]) != std::bit_cast<U>(b.values()[i])) return false;
  return true;
}

AdapterLayer<double> random_layer(AdapterKind kind, std::size_t d, std::size_t k, std::size_t r,
                                  Rng& rng) {
  auto w0 = share(oracle::random_matrix<double>(d, k, rng));
  const auto ud = static_cast<std::uint32_t>(d), uk = static_cast<std::uint32_t>(k),
             ur = static_cast<std::uint32_t>(r);
  switch (kind) {
    case AdapterKind::lora: {
      auto a = oracle::random_matrix<double>(r, k, rng);
      return AdapterLayer<double>::lora(w0, std::move(a), oracle::random_matrix<double>(d, r, rng));
    }
    case AdapterKind::sbora_fa:
      return AdapterLayer<double>::sbora_fa(w0, sample_basis_indices(uk, ur, rng.next_u64()),
                                            oracle::random_matrix<double>(d, r, rng));
    case AdapterKind::sbora_fb:
      return AdapterLayer<double>::sbora_fb(w0, sample_basis_indices(ud, ur, rng.next_u64()),
                                            oracle::random_matrix<double>(r, k, rng));
  }
  throw std::logic_error("unreachable");
}

// 1. Sampled forwards equal the dense one-hot forwards bit for bit.
Outcome equivalence() {
  Outcome o;
  Rng rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 0; n < kEquivalenceInstances; ++n) {
    const std::size_t d = 1 + rng.below(32), k = 1 + rng.below(32);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    const auto x = oracle::random_matrix<double>(1 + rng.below(4), k, rng);
    for (auto kind : {AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
      const auto layer = random_layer(kind, d, k, r, rng);
      o.require(bitwise_equal(forward(layer, x), oracle::dense_forward(layer, x)),
                std::string(to_string(kind)) + " instance " + std::to_string(n) + " differs");
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < kEquivalenceBudgetSeconds, "too slow");
  if (o.pass)
    o.detail = std::to_string(kEquivalenceInstances) + " instances x {fa, fb}, bitwise, " +
               std::to_string(secs) + " s";
  return o;
}

// Evaluates "w14+b12"-style entries: w_ij = 10 i + j, b_ij = 1000 (10 i + j), 1-based.
double symbol_value(const std::string& expr) {
  double total = 0.0;
  std::size_t pos = 0;
  while (pos < expr.size()) {
    const auto plus = expr.find('+', pos);
    const auto term = expr.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    const double ij = 10.0 * (term[1] - '0') + (term[2] - '0');
    total += term[0] == 'w' ? ij : 1000.0 * ij;
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return total;
}

bool pattern_matches(const Matrix<double>& merged, const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (merged(i, j) != symbol_value(rows[i][j])) return false;
  return true;
}

// 2. Merge touches only the basis columns (rows); the worked 4x4 examples.
Outcome regional_update() {
  Outcome o;
  Rng rng(202);
  for (int n = 0; n < kRegionalInstances; ++n) {
    const std::size_t d = 1 + rng.below(32), k = 1 + rng.below(32);
    const std::size_t r = 1 + rng.below(std::min(d, k));
    for (auto kind : {AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
      const auto layer = random_layer(kind, d, k, r, rng);
      const auto merged = merge(layer);
      const auto expected = oracle::add(layer.w0(), oracle::dense_delta(layer));
      const auto& basis = *layer.basis();
      std::size_t changed_lines = 0;
      bool outside_ok = true, inside_ok = true;
      for (std::size_t line = 0; line < (kind == AdapterKind::sbora_fa ? k : d); ++line) {
        bool changed = false;
        for (std::size_t t = 0; t < (kind == AdapterKind::sbora_fa ? d : k); ++t) {
          const auto [i, j] = kind == AdapterKind::sbora_fa ? std::pair{t, line} : std::pair{line, t};
          const bool same = std::bit_cast<std::uint64_t>(merged(i, j)) ==
                            std::bit_cast<std::uint64_t>(layer.w0()(i, j));
          changed = changed || !same;
          if (basis.contains(static_cast<std::uint32_t>(line)))
            inside_ok = inside_ok && std::bit_cast<std::uint64_t>(merged(i, j)) ==
                                         std::bit_cast<std::uint64_t>(expected(i, j));
          else
            outside_ok = outside_ok && same;
        }
        changed_lines += changed ? 1 : 0;
      }
      const std::string tag = std::string(to_string(kind)) + " instance " + std::to_string(n);
      o.require(outside_ok, tag + ": entry outside the basis changed");
      o.require(inside_ok, tag + ": basis entry differs from W0 + BA");
      o.require(changed_lines <= r, tag + ": more than r lines changed");
    }
  }

  // The worked r = 2 examples with basis {e1, e4}, transcribed entry by entry.
  Matrix<double> w(4, 4), b(4, 2), a(2, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) w(i, j) = symbol_value("w" + std::to_string(10 * (i + 1) + j + 1));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t p = 0; p < 2; ++p) b(i, p) = symbol_value("b" + std::to_string(10 * (i + 1) + p + 1));
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t j = 0; j < 4; ++j) a(p, j) = symbol_value("b" + std::to_string(10 * (p + 1) + j + 1));
  const auto w0 = share(w);
  const BasisIndexSet e1e4(4, {0, 3});
  const std::vector<std::vector<std::string>> fa_pattern = {
      {"w11+b11", "w12", "w13", "w14+b12"},
      {"w21+b21", "w22", "w23", "w24+b22"},
      {"w31+b31", "w32", "w33", "w34+b32"},
      {"w41+b41", "w42", "w43", "w44+b42"}};
  const std::vector<std::vector<std::string>> fb_pattern = {
      {"w11+b11", "w12+b12", "w13+b13", "w14+b14"},
      {"w21", "w22", "w23", "w24"},
      {"w31", "w32", "w33", "w34"},
      {"w41+b21", "w42+b22", "w43+b23", "w44+b24"}};
  o.require(pattern_matches(merge(AdapterLayer<double>::sbora_fa(w0, e1e4, b)), fa_pattern),
            "fa 4x4 pattern");
  o.require(pattern_matches(merge(AdapterLayer<double>::sbora_fb(w0, e1e4, a)), fb_pattern),
            "fb 4x4 pattern");
  if (o.pass)
    o.detail = std::to_string(kRegionalInstances) + " instances x {fa, fb} bitwise; 4x4 patterns match";
  return o;
}

// Closed forms kept here, independent of the library's cost model.
struct Expected {
  std::uint64_t trainable, total, mults, adds;
};

Expected expected_cost(AdapterKind kind, std::uint64_t d, std::uint64_t k, std::uint64_t r) {
  const std::uint64_t base_m = d * k, base_a = d * (k - 1);
  switch (kind) {
    case AdapterKind::lora:
      return {(k + d) * r, (k + d) * r, base_m + r * k + d * r,
              base_a + r * (k - 1) + d * (r - 1) + d};
    case AdapterKind::sbora_fa:
      return {d * r, d * r + r, base_m + d * r, base_a + d * (r - 1) + d};
    case AdapterKind::sbora_fb:
      return {k * r, k * r + r, base_m + r * k, base_a + r * (k - 1) + r};
  }
  return {};
}

// 3. Counters equal the closed forms on the full grid; FA/LoRA = 1/2 when d = k.
Outcome cost_model() {
  Outcome o;
  std::size_t cells = 0;
  for (auto kind : {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb})
    for (std::uint32_t d = 1; d <= kGridMax; ++d)
      for (std::uint32_t k = 1; k <= kGridMax; ++k)
        for (std::uint32_t r = 1; r <= std::min(d, k); ++r) {
          const auto e = expected_cost(kind, d, k, r);
          const auto measured = measured_cost(kind, d, k, r);
          const auto analytic = analytic_cost(kind, d, k, r);
          const std::string tag = std::string(to_string(kind)) + " d=" + std::to_string(d) +
                                  " k=" + std::to_string(k) + " r=" + std::to_string(r);
          o.require(measured.mults == e.mults && measured.adds == e.adds, tag + ": counters");
          o.require(analytic.mults == e.mults && analytic.adds == e.adds, tag + ": analytic flops");
          o.require(analytic.trainable_params == e.trainable && analytic.total_params == e.total,
                    tag + ": params");
          if (kind == AdapterKind::sbora_fa && d == k) {
            const auto lora = analytic_params(AdapterKind::lora, d, k, r);
            o.require(2 * analytic.trainable_params == lora.trainable_params, tag + ": ratio");
          }
          ++cells;
        }
  if (o.pass) o.detail = std::to_string(cells) + " grid cells exact; FA/LoRA trainable = 0.5 on d = k";
  return o;
}

// 4. Finite differences agree with backward(); training never moves W0 or the basis.
Outcome gradients() {
  Outcome o;
  Rng rng(404);
  double worst = 0.0;
  for (auto kind : {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
    for (int n = 0; n < kGradcheckInstances; ++n) {
      const std::size_t d = 1 + rng.below(12), k = 1 + rng.below(12);
      const std::size_t r = 1 + rng.below(std::min(d, k));
      const auto layer = random_layer(kind, d, k, r, rng);
      const auto x = oracle::random_matrix<double>(1 + rng.below(4), k, rng);
      const MeanSquaredErrorLoss loss(oracle::random_matrix<double>(x.rows(), d, rng));
      const auto rep = finite_diff_check(layer, x, loss, kGradEps, kGradTol);
      worst = std::max(worst, rep.max_rel_err);
      o.require(rep.pass && rep.max_rel_err <= kGradTol,
                std::string(to_string(kind)) + " instance " + std::to_string(n) +
                    " rel err " + std::to_string(rep.max_rel_err));
    }
  }
  std::size_t runs = 0;
  for (auto task_kind : {TaskKind::teacher_student_columns, TaskKind::teacher_student_rows,
                         TaskKind::dense_teacher}) {
    const auto task = make_task<double>(task_kind, 7, 5, 2, 41, 0.05);
    const Matrix<double> w0_before = *task.w0;
    for (auto kind : {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
      auto layer = kind == AdapterKind::lora
                       ? AdapterLayer<double>::lora(task.w0, 2, 3)
                   : kind == AdapterKind::sbora_fa
                       ? AdapterLayer<double>::sbora_fa(task.w0, sample_basis_indices(5, 2, 8))
                       : AdapterLayer<double>::sbora_fb(task.w0, sample_basis_indices(7, 2, 8));
      const auto basis_before = layer.basis();
      TrainConfig cfg;
      cfg.steps = 100;
      cfg.batch = 8;
      (void)train(layer, task, cfg);
      o.require(bitwise_equal(layer.w0(), w0_before), "W0 moved during training");
      o.require(layer.basis() == basis_before, "basis moved during training");
      ++runs;
    }
  }
  if (o.pass) {
    std::ostringstream s;
    s << kGradcheckInstances << " per kind, max rel err " << worst << " <= " << kGradTol << "; "
      << runs << " training runs left W0 and basis intact";
    o.detail = s.str();
  }
  return o;
}

// 5. Matched basis learns the teacher; mismatched basis stops at the least-squares floor.
Outcome learning() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto task = make_task<double>(TaskKind::teacher_student_columns, 8, 8, 2, 1, 0.0);

  auto matched = AdapterLayer<double>::sbora_fa(task.w0, *task.support);
  TrainConfig cfg;
  cfg.steps = kMaxSteps;
  cfg.seed = 2;
  (void)train(matched, task, cfg);
  const double mse = eval(matched, task, 4096, 77);
  o.require(mse < kMatchedMseTarget, "matched mse " + std::to_string(mse));

  std::vector<std::uint32_t> others;
  for (std::uint32_t j = 0; j < 8 && others.size() < 2; ++j)
    if (!task.support->contains(j)) others.push_back(j);
  const BasisIndexSet wrong(8, others);
  auto mismatched = AdapterLayer<double>::sbora_fa(task.w0, wrong);
  TrainConfig full;
  full.steps = kMaxSteps;
  full.batch = 256;
  full.dataset_size = 256;
  full.seed = 2;
  full.optimizer = OptimizerKind::sgd;
  full.lr = 0.1;
  (void)train(mismatched, task, full);
  const auto data = training_dataset(task, full);
  const double floor = oracle::fa_least_squares_residual(*task.w0, wrong, data.x, data.y);
  const double reached = dataset_mse(mismatched, data);
  o.require(std::abs(reached - floor) <= kFloorTol,
            "floor " + std::to_string(floor) + " reached " + std::to_string(reached));
  const double secs = seconds_since(t0);
  o.require(secs < kLearningBudgetSeconds, "too slow");
  if (o.pass) {
    std::ostringstream s;
    s << "matched mse " << mse << "; mismatched |mse - floor| " << std::abs(reached - floor)
      << " (floor " << floor << "); " << secs << " s";
    o.detail = s.str();
  }
  return o;
}

// 6. Disjoint adapters do not see each other's inputs; merge order is irrelevant.
Outcome composition() {
  Outcome o;
  Rng rng(606);
  for (int n = 0; n < kCompositionInstances; ++n) {
    const std::size_t d = 2 + rng.below(15), k = 2 + rng.below(15);
    for (auto kind : {AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
      const bool columns = kind == AdapterKind::sbora_fa;
      const auto dim = static_cast<std::uint32_t>(columns ? k : d);
      // Split a random permutation into two disjoint bases.
      const auto all = sample_basis_indices(dim, dim, 0);
      std::vector<std::uint32_t> perm(all.indices().begin(), all.indices().end());
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      const std::size_t r1 = 1 + rng.below(dim - 1);
      const std::size_t r2 = 1 + rng.below(dim - r1);
      std::vector<std::uint32_t> s1(perm.begin(), perm.begin() + r1);
      std::vector<std::uint32_t> s2(perm.begin() + r1, perm.begin() + r1 + r2);
      std::sort(s1.begin(), s1.end());
      std::sort(s2.begin(), s2.end());
      auto w0 = share(oracle::random_matrix<double>(d, k, rng));
      auto make = [&](const std::vector<std::uint32_t>& s) {
        return columns ? AdapterLayer<double>::sbora_fa(w0, BasisIndexSet(dim, s),
                                                        oracle::random_matrix<double>(d, s.size(), rng))
                       : AdapterLayer<double>::sbora_fb(w0, BasisIndexSet(dim, s),
                                                        oracle::random_matrix<double>(s.size(), k, rng));
      };
      const auto l1 = make(s1);
      const auto l2 = make(s2);
      const double lambda1 = rng.uniform(0.5, 2.0), lambda2 = rng.uniform(0.5, 2.0);
      const std::string tag = std::string(to_string(kind)) + " instance " + std::to_string(n);

      if (columns) {
        // x lives on adapter 2's columns only: adapter 1 must add exactly nothing.
        auto x = oracle::random_matrix<double>(3, k, rng);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::uint32_t j = 0; j < k; ++j)
            if (!std::binary_search(s2.begin(), s2.end(), j)) x(i, j) = 0.0;
        Matrix<double> h1(3, d);
        accumulate_adapter(l1, x, lambda1, h1);
        o.require(std::all_of(h1.values().begin(), h1.values().end(), [](double v) { return v == 0.0; }),
                  tag + ": crosstalk");
        const CombinedModel<double> both(w0, {{l1, lambda1}, {l2, lambda2}});
        const CombinedModel<double> only2(w0, {{l2, lambda2}});
        o.require(combine_adapters(both, x) == combine_adapters(only2, x), tag + ": combined output");
      } else {
        // Adapter 1 writes only its own output rows.
        const auto x = oracle::random_matrix<double>(3, k, rng);
        Matrix<double> h1(3, d);
        accumulate_adapter(l1, x, lambda1, h1);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::uint32_t j : s2) o.require(h1(i, j) == 0.0, tag + ": crosstalk");
      }

      std::ostringstream f12, f21;
      save_base(f12, merge_all(CombinedModel<double>(w0, {{l1, lambda1}, {l2, lambda2}})));
      save_base(f21, merge_all(CombinedModel<double>(w0, {{l2, lambda2}, {l1, lambda1}})));
      o.require(f12.str() == f21.str(), tag + ": merge order changed the bytes");
    }
  }
  if (o.pass)
    o.detail = std::to_string(kCompositionInstances) +
               " instances x {fa, fb}: zero crosstalk, merge files byte-identical in both orders";
  return o;
}

// 7. NF4 round trip: idempotent, within half the widest codebook gap, forward bitwise.
Outcome quantized_path() {
  Outcome o;
  // Codebook rebuilt from bisected normal quantiles.
  const double offset = 0.9677083;
  std::vector<double> cb;
  for (int i = 0; i < 7; ++i) cb.push_back(-oracle::normal_quantile_bisect(offset - (offset - 0.5) * i / 7.0));
  cb.push_back(0.0);
  for (int i = 7; i >= 0; --i) cb.push_back(oracle::normal_quantile_bisect(offset - (offset - 0.5) * i / 8.0));
  std::sort(cb.begin(), cb.end());
  const double top = cb.back();
  double max_gap = 0.0;
  for (std::size_t i = 1; i < cb.size(); ++i) max_gap = std::max(max_gap, (cb[i] - cb[i - 1]) / top);
  const double half_gap = max_gap / 2.0;

  Rng rng(707);
  Matrix<double> w(kQuantBlocks, kQuantBlockSize);
  for (std::size_t b = 0; b < kQuantBlocks; ++b) {
    const double scale = std::exp(rng.uniform(-6.0, 6.0));
    for (std::size_t j = 0; j < kQuantBlockSize; ++j) {
      double v = scale * rng.normal();
      if (b % 10 == 3) v = 0.0;                      // zero block
      if (b % 10 == 7 && j == 5) v *= 50.0;          // one outlier
      w(b, j) = v;
    }
  }
  const auto q = quantize(w, kQuantBlockSize);
  const auto back = dequantize<double>(q);
  o.require(quantize(back, kQuantBlockSize) == q, "not idempotent");
  o.require(bitwise_equal(dequantize<double>(quantize(back, kQuantBlockSize)), back),
            "dequantized values drift");
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = q.absmax()[i / kQuantBlockSize];
    const double err = std::abs(w.values()[i] - back.values()[i]);
    o.require(err <= s * half_gap, "entry " + std::to_string(i) + " beyond the half-gap bound");
    if (s > 0) worst_ratio = std::max(worst_ratio, err / s);
  }

  Rng frng(708);
  for (auto kind : {AdapterKind::lora, AdapterKind::sbora_fa, AdapterKind::sbora_fb}) {
    const auto w0 = oracle::random_matrix<double>(24, 40, frng);
    const auto qw = quantize(w0, kQuantBlockSize);
    const auto layer = random_layer(kind, 24, 40, 4, frng);
    const auto deq = share(dequantize<double>(qw));
    const auto on_deq = kind == AdapterKind::lora
                            ? AdapterLayer<double>::lora(deq, layer.a(), layer.b())
                        : kind == AdapterKind::sbora_fa
                            ? AdapterLayer<double>::sbora_fa(deq, *layer.basis(), layer.b())
                            : AdapterLayer<double>::sbora_fb(deq, *layer.basis(), layer.a());
    const auto x = oracle::random_matrix<double>(5, 40, frng);
    o.require(bitwise_equal(quantized_forward(qw, layer, x), forward(on_deq, x)),
              std::string(to_string(kind)) + ": quantized forward");
  }
  if (o.pass) {
    std::ostringstream s;
    s << kQuantBlocks << " blocks: idempotent, worst |err|/absmax " << worst_ratio
      << " <= half gap " << half_gap << "; quantized forward bitwise for 3 kinds";
    o.detail = s.str();
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 8. Every CLI command reruns byte-identically.
Outcome cli_determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty() || !fs::exists(cli)) {
    o.require(false, "CLI binary not available");
    return o;
  }
  const fs::path work = fs::absolute("acceptance_work");
  fs::remove_all(work);
  const std::vector<std::pair<std::string, std::string>> steps = {
      {"gradcheck", "gradcheck --instances 5 --out gradcheck.json"},
      {"train", "train --steps 300 --seed 3 --out_dir fa"},
      {"train", "train --method fb --task rows --steps 300 --seed 3 --out_dir fb"},
      {"bench", "bench --d 1..6 --k 1..6 --r 1..6 --out bench.csv --report bench.json"},
      {"merge", "merge --base fa/base.sbora --adapters fa/adapter.sbora,fb/adapter.sbora "
                "--lambdas 1,0.5 --out merged.sbora --report merge.json"},
      {"quantize", "quantize --in fa/base.sbora --out base.sbq4 --block_size 16 "
                   "--dequant_out dequant.sbora --report quantize.json"},
  };
  for (const char* run : {"run1", "run2"}) {
    fs::create_directories(work / run);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string cmd = "cd \"" + (work / run).string() + "\" && \"" + cli + "\" " +
                              steps[i].second + " > stdout_" + std::to_string(i) + ".txt 2> /dev/null";
      o.require(std::system(cmd.c_str()) == 0, std::string(run) + ": " + steps[i].first + " failed");
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(work / "run1")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), work / "run1");
    o.require(fs::exists(work / "run2" / rel) && slurp(entry.path()) == slurp(work / "run2" / rel),
              rel.string() + " differs between runs");
    ++files;
  }
  std::set<std::string> commands;
  for (const auto& s : steps) commands.insert(s.first);
  if (o.pass)
    o.detail = std::to_string(commands.size()) + " commands, " + std::to_string(files) +
               " output files byte-identical across reruns";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? fs::absolute(argv[1]).string() : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"equivalence oracle", equivalence},
      {"regional update", regional_update},
      {"cost model", cost_model},
      {"gradient correctness", gradients},
      {"learning behavior", learning},
      {"orthogonal composition", composition},
      {"quantized path", quantized_path},
      {"determinism", [&] { return cli_determinism(cli); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " ["
              << criteria[i].first << "] " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
