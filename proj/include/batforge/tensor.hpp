#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "batforge/errors.hpp"
#include "batforge/f16.hpp"

namespace batforge {

// Dense row-major matrix.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatF16 = Mat<F16>;
using MatF64 = Mat<double>;

inline bool f16_bits_equal(const MatF16& a, const MatF16& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    if (a.data()[i].bits() != b.data()[i].bits()) return false;
  }
  return true;
}

// Integer code range of an N-bit quantizer.
inline std::int32_t quant_min(int bits, bool is_signed) {
  return is_signed ? -(std::int32_t(1) << (bits - 1)) : 0;
}
inline std::int32_t quant_max(int bits, bool is_signed) {
  return is_signed ? (std::int32_t(1) << (bits - 1)) - 1
                   : (std::int32_t(1) << bits) - 1;
}

inline bool valid_act_bits(int bits) {
  return bits == 1 || bits == 2 || bits == 4 || bits == 8 || bits == 16;
}

// Quantized activation tensor: integer codes plus the affine parameters that
// map them back to real values (value = scale * code; bias is the shift that
// was folded in before rounding).
class QTensor {
 public:
  QTensor() = default;
  QTensor(std::size_t rows, std::size_t cols, int bits, bool is_signed,
          F16 scale, F16 bias)
      : codes_(rows, cols, 0),
        bits_(bits),
        signed_(is_signed),
        scale_(scale),
        bias_(bias) {
    if (!valid_act_bits(bits) || bits == 16) {
      throw ShapeError("QTensor: unsupported bit width");
    }
  }

  // Validates every code against the declared range.
  void set_code(std::size_t r, std::size_t c, std::int32_t v) {
    if (v < quant_min(bits_, signed_) || v > quant_max(bits_, signed_)) {
      throw ShapeError("QTensor: code out of range for declared width");
    }
    codes_(r, c) = v;
  }

  std::int32_t code(std::size_t r, std::size_t c) const {
    return codes_(r, c);
  }

  std::size_t rows() const { return codes_.rows(); }
  std::size_t cols() const { return codes_.cols(); }
  int bits() const { return bits_; }
  bool is_signed() const { return signed_; }
  F16 scale() const { return scale_; }
  F16 bias() const { return bias_; }
  Mat<std::int32_t>& raw() { return codes_; }
  const Mat<std::int32_t>& raw() const { return codes_; }

 private:
  Mat<std::int32_t> codes_;
  int bits_ = 8;
  bool signed_ = true;
  F16 scale_;
  F16 bias_;
};

// Binarized weight matrix: packed sign bits (1 = +1, 0 = -1) and one positive
// scale.  Bits are packed row-major, LSB first within each byte, with rows
// padded to whole bytes.
class BinWeight {
 public:
  BinWeight() = default;
  BinWeight(std::size_t rows, std::size_t cols, F16 scale)
      : rows_(rows),
        cols_(cols),
        scale_(scale),
        bits_((cols + 7) / 8 * rows, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  F16 scale() const { return scale_; }
  void set_scale(F16 s) { scale_ = s; }

  std::size_t row_bytes() const { return (cols_ + 7) / 8; }

  void set_sign(std::size_t r, std::size_t c, int sign) {
    std::size_t idx = r * row_bytes() + c / 8;
    std::uint8_t mask = static_cast<std::uint8_t>(1u << (c % 8));
    if (sign >= 0) {
      bits_[idx] |= mask;
    } else {
      bits_[idx] &= static_cast<std::uint8_t>(~mask);
    }
  }

  // +1 or -1.
  int sign(std::size_t r, std::size_t c) const {
    std::size_t idx = r * row_bytes() + c / 8;
    return (bits_[idx] >> (c % 8)) & 1 ? 1 : -1;
  }

  std::vector<std::uint8_t>& packed() { return bits_; }
  const std::vector<std::uint8_t>& packed() const { return bits_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  F16 scale_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace batforge
