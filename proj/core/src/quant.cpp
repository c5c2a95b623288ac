// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/quant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "sbora/le_io.hpp"

namespace sbora {
namespace {

constexpr char kQuantMagic[6] = {'S', 'B', 'Q', '4', 'N', 'F'};

std::array<double, 16> build_codebook() {
  const boost::math::normal_distribution<double> normal;
  std::array<double, 16> cb{};
  std::size_t n = 0;
  // 8 positive levels: probabilities linspace(offset, 0.5, 9) minus the 0.5 end.
  for (int i = 0; i < 8; ++i) {
    const double p = kNf4Offset + (0.5 - kNf4Offset) * i / 8.0;
    cb[n++] = boost::math::quantile(normal, p);
  }
  // 7 negative levels: linspace(offset, 0.5, 8) minus the 0.5 end.
  for (int i = 0; i < 7; ++i) {
    const double p = kNf4Offset + (0.5 - kNf4Offset) * i / 7.0;
    cb[n++] = -boost::math::quantile(normal, p);
  }
  cb[n++] = 0.0;
  std::sort(cb.begin(), cb.end());
  const double top = cb.back();
  for (double& v : cb) v /= top;
  cb.front() = -1.0;
  cb.back() = 1.0;
  return cb;
}

std::array<double, 15> build_midpoints() {
  const auto& cb = nf4_codebook();
  std::array<double, 15> mid{};
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (cb[i] + cb[i + 1]);
  return mid;
}

// Smallest float not below m.
float scale_not_below(double m) {
  float s = static_cast<float>(m);
  if (static_cast<double>(s) < m) s = std::nextafter(s, std::numeric_limits<float>::infinity());
  return s;
}

std::size_t block_count_for(std::size_t n, std::size_t block_size) {
  return (n + block_size - 1) / block_size;
}

}  // namespace

const std::array<double, 16>& nf4_codebook() {
  static const std::array<double, 16> cb = build_codebook();
  return cb;
}

std::uint8_t nf4_encode(double v) {
  static const std::array<double, 15> mid = build_midpoints();
  // First midpoint at or above v; ties land on the lower entry.
  const auto it = std::lower_bound(mid.begin(), mid.end(), v);
  return static_cast<std::uint8_t>(it - mid.begin());
}

double nf4_max_gap() {
  const auto& cb = nf4_codebook();
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < cb.size(); ++i) gap = std::max(gap, cb[i + 1] - cb[i]);
  return gap;
}

QuantizedMatrix::QuantizedMatrix(std::size_t rows, std::size_t cols, std::size_t block_size,
                                 std::vector<float> absmax, std::vector<std::uint8_t> packed_codes)
    : rows_(rows), cols_(cols), block_size_(block_size), absmax_(std::move(absmax)),
      codes_(std::move(packed_codes)) {
  if (block_size_ == 0) throw std::invalid_argument("QuantizedMatrix: block_size must be positive");
  const std::size_t n = rows_ * cols_;
  if (absmax_.size() != block_count_for(n, block_size_)) {
    throw DimensionError("QuantizedMatrix: expected " +
                         std::to_string(block_count_for(n, block_size_)) + " scales, got " +
                         std::to_string(absmax_.size()));
  }
  if (codes_.size() != (n + 1) / 2) {
    throw DimensionError("QuantizedMatrix: expected " + std::to_string((n + 1) / 2) +
                         " code bytes, got " + std::to_string(codes_.size()));
  }
  for (float s : absmax_) {
    if (!std::isfinite(s) || s < 0.0f) throw NumericError("QuantizedMatrix: invalid block scale");
  }
}

template <typename T>
QuantizedMatrix quantize(const Matrix<T>& w, std::size_t block_size) {
  if (block_size == 0) throw std::invalid_argument("quantize: block_size must be positive");
  if (!w.all_finite()) throw NumericError("quantize: weight matrix has non-finite entries");
  const auto values = w.values();
  const std::size_t n = values.size();
  const std::size_t blocks = block_count_for(n, block_size);
  std::vector<float> absmax(blocks, 0.0f);
  std::vector<std::uint8_t> codes((n + 1) / 2, 0);

  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(n, lo + block_size);
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(static_cast<double>(values[i])));
    const float scale = m == 0.0 ? 0.0f : scale_not_below(m);
    absmax[b] = scale;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint8_t c =
          scale == 0.0f ? kNf4ZeroCode : nf4_encode(static_cast<double>(values[i]) / scale);
      codes[i / 2] |= static_cast<std::uint8_t>(c << (4 * (i % 2)));
    }
  }
  return QuantizedMatrix(w.rows(), w.cols(), block_size, std::move(absmax), std::move(codes));
}

template <typename T>
Matrix<T> dequantize(const QuantizedMatrix& q) {
  const auto& cb = nf4_codebook();
  Matrix<T> w(q.rows(), q.cols());
  auto out = w.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = q.absmax()[i / q.block_size()];
    out[i] = static_cast<T>(cb[q.code(i)] * s);
  }
  return w;
}

template <typename T>
Activation<T> quantized_forward(const QuantizedMatrix& q, const AdapterLayer<T>& layer,
                                const Activation<T>& x) {
  if (q.rows() != layer.d() || q.cols() != layer.k()) {
    throw DimensionError("quantized_forward: quantized base is " + shape_string(q.rows(), q.cols()) +
                         ", adapter expects " + shape_string(layer.d(), layer.k()));
  }
  return forward_on_base(dequantize<T>(q), layer, x);
}

template <typename T>
Matrix<T> quantized_merge(const QuantizedMatrix& q, const AdapterLayer<T>& layer) {
  Matrix<T> w = dequantize<T>(q);
  merge_into(w, layer, T(1));
  return w;
}

void save_quantized(std::ostream& out, const QuantizedMatrix& q) {
  auto u32 = [](std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw FormatError(std::string(what) + " does not fit in u32");
    return static_cast<std::uint32_t>(v);
  };
  out.write(kQuantMagic, sizeof kQuantMagic);
  le::write_u32(out, u32(q.rows(), "rows"));
  le::write_u32(out, u32(q.cols(), "cols"));
  le::write_u32(out, u32(q.block_size(), "block_size"));
  for (float s : q.absmax()) le::write_f32(out, s);
  out.write(reinterpret_cast<const char*>(q.packed_codes().data()),
            static_cast<std::streamsize>(q.packed_codes().size()));
  out.flush();
  if (!out) throw FormatError("write failed");
}

void save_quantized(const std::filesystem::path& path, const QuantizedMatrix& q) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  save_quantized(out, q);
}

QuantizedMatrix load_quantized(std::istream& in) {
  char magic[sizeof kQuantMagic];
  le::read_exact(in, magic, sizeof magic, "magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kQuantMagic))) {
    throw FormatError("bad magic: not an SBQ4NF file");
  }
  const std::size_t rows = le::read_u32(in, "rows");
  const std::size_t cols = le::read_u32(in, "cols");
  const std::size_t block = le::read_u32(in, "block_size");
  if (rows == 0 || cols == 0 || block == 0) throw FormatError("zero dimension in SBQ4NF header");
  const std::size_t n = rows * cols;
  std::vector<float> absmax(block_count_for(n, block));
  for (float& s : absmax) s = le::read_f32(in, "absmax");
  std::vector<std::uint8_t> codes((n + 1) / 2);
  le::read_exact(in, reinterpret_cast<char*>(codes.data()), codes.size(), "codes");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after codes");
  try {
    return QuantizedMatrix(rows, cols, block, std::move(absmax), std::move(codes));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid SBQ4NF payload: ") + e.what());
  }
}

QuantizedMatrix load_quantized(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return load_quantized(in);
}

#define SBORA_INSTANTIATE_QUANT(T)                                                          \
  template QuantizedMatrix quantize(const Matrix<T>&, std::size_t);                         \
  template Matrix<T> dequantize<T>(const QuantizedMatrix&);                                 \
  template Activation<T> quantized_forward(const QuantizedMatrix&, const AdapterLayer<T>&, \
                                           const Activation<T>&);                           \
  template Matrix<T> quantized_merge(const QuantizedMatrix&, const AdapterLayer<T>&);

SBORA_INSTANTIATE_QUANT(float)
SBORA_INSTANTIATE_QUANT(double)

#undef SBORA_INSTANTIATE_QUANT

}  // namespace sbora
