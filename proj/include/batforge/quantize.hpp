#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "batforge/errors.hpp"
#include "batforge/f16.hpp"
#include "batforge/tensor.hpp"

namespace batforge {

// Parameters of one elastic activation quantizer site.  The reciprocal of the
// scale is computed once here and reused everywhere; the division is never
// redone online, so the binary16 rounding of 1/scale is part of the contract.
struct ElasticParams {
  F16 scale;
  F16 inv_scale;
  F16 bias;
  int bits = 8;
  bool is_signed = true;

  ElasticParams() = default;
  ElasticParams(F16 scale_, F16 bias_, int bits_, bool is_signed_)
      : scale(scale_),
        inv_scale(f16_recip(scale_)),
        bias(bias_),
        bits(bits_),
        is_signed(is_signed_) {
    if (!(scale_.to_f64() > 0.0) || !scale_.is_finite()) {
      throw ShapeError("ElasticParams: scale must be positive and finite");
    }
    if (!valid_act_bits(bits_) || bits_ == 16) {
      throw ShapeError("ElasticParams: unsupported bit width");
    }
  }
};

// Round a binary16 value to the nearest integer (ties to even) and saturate
// to 16-bit signed range.  This is the converter block between the quantizer
// multiplier and the clip stage; NaN is a fault, not a value.
inline std::int32_t f16_to_int_rne(F16 x) {
  if (x.is_nan()) throw NumericFaultError("f16_to_int_rne: NaN input");
  double v = x.to_f64();
  if (v >= 32767.0) return 32767;
  if (v <= -32768.0) return -32768;
  double r = std::nearbyint(v);  // default mode: round to nearest, ties even
  return static_cast<std::int32_t>(r);
}

// Saturating clip implemented the way the hardware does it: inspect the high
// bits of the 16-bit two's-complement input instead of comparing magnitudes.
//
// Signed N-bit output: if bits [15 : N-1] are all equal the value already
// fits and passes through; otherwise saturate to 2^(N-1)-1 when the sign bit
// is 0 and to -2^(N-1) when it is 1.  Unsigned N-bit output: if bits [15 : N]
// are all zero the value passes through; otherwise negative inputs clamp to 0
// and positive ones to 2^N - 1.
inline std::int32_t clip_unit(std::int16_t x, int bits, bool is_signed) {
  if (bits < 1 || bits >= 16) {
    throw ShapeError("clip_unit: output width must be in [1, 15]");
  }
  const std::uint16_t u = static_cast<std::uint16_t>(x);
  const bool sign = (u & 0x8000u) != 0;
  if (is_signed) {
    const std::uint16_t high = static_cast<std::uint16_t>(u >> (bits - 1));
    const std::uint16_t all = static_cast<std::uint16_t>(0xFFFFu >> (bits - 1));
    if (high == 0 || high == all) {
      return x;  // representable: the top bits are a pure sign extension
    }
    return sign ? -(std::int32_t(1) << (bits - 1))
                : (std::int32_t(1) << (bits - 1)) - 1;
  }
  if ((u >> bits) == 0) {
    return x;
  }
  return sign ? 0 : (std::int32_t(1) << bits) - 1;
}

// Reference clip: plain arithmetic saturation to the same ranges.
inline std::int32_t clip_arith(std::int32_t x, int bits, bool is_signed) {
  const std::int32_t lo = quant_min(bits, is_signed);
  const std::int32_t hi = quant_max(bits, is_signed);
  return x < lo ? lo : (x > hi ? hi : x);
}

// One element through the elastic quantizer: shift by the bias, multiply by
// the stored reciprocal scale (both in binary16), convert to integer with
// round-to-nearest-even, clip to the code range.
inline std::int32_t elastic_quantize_one(F16 x, const ElasticParams& p) {
  F16 shifted = x + p.bias;
  F16 scaled = shifted * p.inv_scale;
  std::int32_t i = f16_to_int_rne(scaled);
  return clip_arith(i, p.bits, p.is_signed);
}

// Same pipeline with the clip done by the hardware bit-inspection unit.  The
// integer converter saturates to int16 first, exactly like the 16-bit bus in
// front of the clip stage.
inline std::int32_t hw_quantize_one(F16 x, const ElasticParams& p) {
  F16 shifted = x + p.bias;
  F16 scaled = shifted * p.inv_scale;
  std::int32_t i = f16_to_int_rne(scaled);
  return clip_unit(static_cast<std::int16_t>(i), p.bits, p.is_signed);
}

inline QTensor elastic_quantize(const MatF16& x, const ElasticParams& p) {
  QTensor q(x.rows(), x.cols(), p.bits, p.is_signed, p.scale, p.bias);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      q.set_code(r, c, elastic_quantize_one(x(r, c), p));
    }
  }
  return q;
}

// value = scale * code, in binary16.
inline F16 dequantize_one(std::int32_t code, F16 scale) {
  return F16::from_f64(static_cast<double>(code)) * scale;
}

inline MatF16 dequantize(const QTensor& q) {
  MatF16 out(q.rows(), q.cols());
  for (std::size_t r = 0; r < q.rows(); ++r) {
    for (std::size_t c = 0; c < q.cols(); ++c) {
      out(r, c) = dequantize_one(q.code(r, c), q.scale());
    }
  }
  return out;
}

// Binarize a real matrix: scale = mean absolute value over all elements,
// sign(0) counts as +1.  Returns the sign pattern and the exact binary64
// scale; deployment rounds the scale to binary16 separately so that offline
// identities can be checked at full precision.
struct SignSplit {
  Mat<std::int8_t> signs;
  double alpha = 0.0;
};

inline SignSplit binarize_signs(const MatF64& w) {
  if (w.size() == 0) throw ShapeError("binarize_signs: empty matrix");
  double sum = 0.0;
  for (double v : w.data()) sum += std::abs(v);
  if (sum == 0.0) {
    throw DegenerateWeightError("binarize_signs: all-zero matrix");
  }
  SignSplit out;
  out.signs = Mat<std::int8_t>(w.rows(), w.cols());
  out.alpha = sum / static_cast<double>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.signs.data()[i] = w.data()[i] < 0.0 ? -1 : 1;
  }
  return out;
}

inline BinWeight bwn_binarize(const MatF64& w) {
  SignSplit s = binarize_signs(w);
  BinWeight b(w.rows(), w.cols(), F16::from_f64(s.alpha));
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      b.set_sign(r, c, s.signs(r, c));
    }
  }
  return b;
}

}  // namespace batforge
