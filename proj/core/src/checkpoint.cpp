// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "sbora/le_io.hpp"

namespace sbora {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish_write(std::ostream& out) {
  out.flush();
  if (!out) throw FormatError("write failed");
}

void write_header(std::ostream& out, const CheckpointHeader& h) {
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  le::write_u32(out, h.kind);
  le::write_u32(out, h.d);
  le::write_u32(out, h.k);
  le::write_u32(out, h.r);
  le::write_u32(out, static_cast<std::uint32_t>(h.precision));
}

template <typename T>
void write_values(std::ostream& out, const Matrix<T>& m) {
  for (T v : m.values()) {
    if constexpr (std::is_same_v<T, float>) le::write_f32(out, v);
    else le::write_f64(out, v);
  }
}

template <typename T>
Matrix<T> read_values(std::istream& in, std::size_t rows, std::size_t cols, Precision p,
                      const char* what) {
  Matrix<T> m(rows, cols);
  for (T& v : m.values()) {
    v = p == Precision::f32 ? static_cast<T>(le::read_f32(in, what))
                            : static_cast<T>(le::read_f64(in, what));
  }
  return m;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw FormatError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

void require_eof(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

}  // namespace

CheckpointHeader read_checkpoint_header(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  le::read_exact(in, magic, sizeof magic, "magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kCheckpointMagic))) {
    throw FormatError("bad magic: not an SBORA1 checkpoint");
  }
  CheckpointHeader h;
  h.kind = le::read_u32(in, "kind");
  h.d = le::read_u32(in, "d");
  h.k = le::read_u32(in, "k");
  h.r = le::read_u32(in, "r");
  const std::uint32_t prec = le::read_u32(in, "precision");
  if (h.kind > static_cast<std::uint32_t>(AdapterKind::sbora_fb)) {
    throw FormatError("unknown kind code " + std::to_string(h.kind));
  }
  if (prec != 32 && prec != 64) throw FormatError("unknown precision " + std::to_string(prec));
  h.precision = static_cast<Precision>(prec);
  if (h.d == 0 || h.k == 0) throw FormatError("zero dimension in header");
  if (h.kind == kBaseKind && h.r != 0) throw FormatError("base-weight file must have r = 0");
  if (h.kind != kBaseKind && h.r == 0) throw FormatError("adapter file has r = 0");
  return h;
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_checkpoint_header(in);
}

template <typename T>
void save_base(std::ostream& out, const Matrix<T>& w0) {
  write_header(out, {kBaseKind, checked_u32(w0.rows(), "d"), checked_u32(w0.cols(), "k"), 0,
                     precision_of<T>});
  write_values(out, w0);
  finish_write(out);
}

template <typename T>
void save_base(const std::filesystem::path& path, const Matrix<T>& w0) {
  auto out = open_out(path);
  save_base(out, w0);
}

template <typename T>
Matrix<T> load_base(std::istream& in) {
  const auto h = read_checkpoint_header(in);
  if (h.kind != kBaseKind) throw FormatError("expected a base-weight file (kind 0)");
  auto m = read_values<T>(in, h.d, h.k, h.precision, "base weight");
  require_eof(in);
  return m;
}

template <typename T>
Matrix<T> load_base(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_base<T>(in);
}

template <typename T>
void save_adapter(std::ostream& out, const AdapterLayer<T>& layer) {
  CheckpointHeader h{static_cast<std::uint32_t>(layer.kind()), checked_u32(layer.d(), "d"),
                     checked_u32(layer.k(), "k"), checked_u32(layer.r(), "r"), precision_of<T>};
  write_header(out, h);
  if (layer.basis()) {
    for (std::uint32_t idx : layer.basis()->indices()) le::write_u32(out, idx);
  }
  if (layer.has_a()) write_values(out, layer.a());
  if (layer.has_b()) write_values(out, layer.b());
  finish_write(out);
}

template <typename T>
void save_adapter(const std::filesystem::path& path, const AdapterLayer<T>& layer) {
  auto out = open_out(path);
  save_adapter(out, layer);
}

template <typename T>
AdapterLayer<T> load_adapter(std::istream& in, std::shared_ptr<const Matrix<T>> w0) {
  const auto h = read_checkpoint_header(in);
  if (h.kind == kBaseKind) throw FormatError("expected an adapter file, found a base weight");
  if (!w0 || w0->rows() != h.d || w0->cols() != h.k) {
    throw DimensionError("adapter checkpoint is " + shape_string(h.d, h.k) +
                         ", base weight is " + (w0 ? shape_string(*w0) : std::string("null")));
  }
  const auto kind = static_cast<AdapterKind>(h.kind);
  switch (kind) {
    case AdapterKind::lora: {
      auto a = read_values<T>(in, h.r, h.k, h.precision, "A");
      auto b = read_values<T>(in, h.d, h.r, h.precision, "B");
      require_eof(in);
      return AdapterLayer<T>::lora(std::move(w0), std::move(a), std::move(b));
    }
    case AdapterKind::sbora_fa:
    case AdapterKind::sbora_fb: {
      std::vector<std::uint32_t> idx(h.r);
      for (auto& v : idx) v = le::read_u32(in, "indices");
      const std::uint32_t dim = kind == AdapterKind::sbora_fa ? h.k : h.d;
      BasisIndexSet basis = [&] {
        try {
          return BasisIndexSet(dim, std::move(idx));
        } catch (const Error& e) {
          throw FormatError(std::string("invalid basis indices: ") + e.what());
        }
      }();
      if (kind == AdapterKind::sbora_fa) {
        auto b = read_values<T>(in, h.d, h.r, h.precision, "B");
        require_eof(in);
        return AdapterLayer<T>::sbora_fa(std::move(w0), std::move(basis), std::move(b));
      }
      auto a = read_values<T>(in, h.r, h.k, h.precision, "A");
      require_eof(in);
      return AdapterLayer<T>::sbora_fb(std::move(w0), std::move(basis), std::move(a));
    }
  }
  throw FormatError("unknown kind code");
}

template <typename T>
AdapterLayer<T> load_adapter(const std::filesystem::path& path,
                             std::shared_ptr<const Matrix<T>> w0) {
  auto in = open_in(path);
  return load_adapter<T>(in, std::move(w0));
}

#define SBORA_INSTANTIATE_CHECKPOINT(T)                                                      \
  template void save_base(std::ostream&, const Matrix<T>&);                                  \
  template void save_base(const std::filesystem::path&, const Matrix<T>&);                   \
  template Matrix<T> load_base<T>(std::istream&);                                            \
  template Matrix<T> load_base<T>(const std::filesystem::path&);                             \
  template void save_adapter(std::ostream&, const AdapterLayer<T>&);                         \
  template void save_adapter(const std::filesystem::path&, const AdapterLayer<T>&);          \
  template AdapterLayer<T> load_adapter<T>(std::istream&, std::shared_ptr<const Matrix<T>>); \
  template AdapterLayer<T> load_adapter<T>(const std::filesystem::path&,                     \
                                           std::shared_ptr<const Matrix<T>>);

SBORA_INSTANTIATE_CHECKPOINT(float)
SBORA_INSTANTIATE_CHECKPOINT(double)

#undef SBORA_INSTANTIATE_CHECKPOINT

}  // namespace sbora
