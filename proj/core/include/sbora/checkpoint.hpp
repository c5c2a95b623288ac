// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "sbora/adapter.hpp"

namespace sbora {

// Binary adapter checkpoint, all integers and floats little-endian:
//
//   "SBORA1"                      6 ASCII bytes
//   kind, d, k, r, precision      u32 each; kind 0 = base weight, 1 = lora,
//                                 2 = sbora-fa, 3 = sbora-fb; precision 32|64
//   indices[r]                    u32 each, sbora-fa/fb only
//   payload                       row-major IEEE-754 at `precision`:
//                                   base:     W0 (d x k), r = 0
//                                   lora:     A (r x k) then B (d x r)
//                                   sbora-fa: B (d x r)
//                                   sbora-fb: A (r x k)
//
// The adapter scale is not stored; loaded adapters have scale 1.

inline constexpr char kCheckpointMagic[6] = {'S', 'B', 'O', 'R', 'A', '1'};
inline constexpr std::uint32_t kBaseKind = 0;

struct CheckpointHeader {
  std::uint32_t kind = 0;
  std::uint32_t d = 0;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  Precision precision = Precision::f64;
};

/// Reads and validates the fixed header. Throws FormatError.
CheckpointHeader read_checkpoint_header(std::istream& in);
CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

template <typename T>
void save_base(std::ostream& out, const Matrix<T>& w0);
template <typename T>
void save_base(const std::filesystem::path& path, const Matrix<T>& w0);

/// Reads a kind-0 file. Payload stored at the other precision is converted.
template <typename T>
Matrix<T> load_base(std::istream& in);
template <typename T>
Matrix<T> load_base(const std::filesystem::path& path);

template <typename T>
void save_adapter(std::ostream& out, const AdapterLayer<T>& layer);
template <typename T>
void save_adapter(const std::filesystem::path& path, const AdapterLayer<T>& layer);

/// Rebuilds an adapter over `w0`. Throws FormatError on a malformed file and
/// DimensionError when the stored d x k disagrees with w0.
template <typename T>
AdapterLayer<T> load_adapter(std::istream& in, std::shared_ptr<const Matrix<T>> w0);
template <typename T>
AdapterLayer<T> load_adapter(const std::filesystem::path& path,
                             std::shared_ptr<const Matrix<T>> w0);

}  // namespace sbora
