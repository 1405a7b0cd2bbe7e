#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace batforge {

// IEEE 754 binary16, stored as its bit pattern.
//
// Arithmetic contract: +, -, *, / and sqrt convert the operands to binary64,
// perform one binary64 operation and round the result once back to binary16.
// Sums and products of binary16 values are exact in binary64 (at most 51
// significant bits), and for division and square root 53 >= 2*11 + 2, so the
// intermediate rounding cannot disturb the final one.  All five operators are
// therefore correctly rounded (round to nearest, ties to even), including
// subnormals, infinities and NaN propagation.
//
// exp() and rsqrt() are deliberately *conventions*, not correctly rounded:
// they evaluate in binary32 (a fixed polynomial for exp, hardware-exact
// sqrt + divide for rsqrt) and round once to binary16.  Every consumer in the
// library goes through these entry points, so reference and simulated paths
// agree bit for bit.
class F16 {
 public:
  constexpr F16() = default;

  static constexpr F16 from_bits(std::uint16_t b) {
    F16 h;
    h.bits_ = b;
    return h;
  }

  static F16 from_f64(double x) { return from_bits(round_f64_to_bits(x)); }
  static F16 from_f32(float x) { return from_f64(static_cast<double>(x)); }

  constexpr std::uint16_t bits() const { return bits_; }

  float to_f32() const { return bits_to_f32(bits_); }
  double to_f64() const { return static_cast<double>(bits_to_f32(bits_)); }

  bool is_nan() const { return (bits_ & 0x7FFF) > 0x7C00; }
  bool is_inf() const { return (bits_ & 0x7FFF) == 0x7C00; }
  bool is_finite() const { return (bits_ & 0x7C00) != 0x7C00; }
  bool is_zero() const { return (bits_ & 0x7FFF) == 0; }
  bool signbit() const { return (bits_ & 0x8000) != 0; }

  F16 operator-() const {
    return from_bits(static_cast<std::uint16_t>(bits_ ^ 0x8000));
  }

  friend F16 operator+(F16 a, F16 b) {
    return from_f64(a.to_f64() + b.to_f64());
  }
  friend F16 operator-(F16 a, F16 b) {
    return from_f64(a.to_f64() - b.to_f64());
  }
  friend F16 operator*(F16 a, F16 b) {
    return from_f64(a.to_f64() * b.to_f64());
  }
  friend F16 operator/(F16 a, F16 b) {
    return from_f64(a.to_f64() / b.to_f64());
  }

  // IEEE comparison semantics: NaN compares false, -0 == +0.
  friend bool operator==(F16 a, F16 b) { return a.to_f32() == b.to_f32(); }
  friend bool operator!=(F16 a, F16 b) { return a.to_f32() != b.to_f32(); }
  friend bool operator<(F16 a, F16 b) { return a.to_f32() < b.to_f32(); }
  friend bool operator<=(F16 a, F16 b) { return a.to_f32() <= b.to_f32(); }
  friend bool operator>(F16 a, F16 b) { return a.to_f32() > b.to_f32(); }
  friend bool operator>=(F16 a, F16 b) { return a.to_f32() >= b.to_f32(); }

  static float bits_to_f32(std::uint16_t h) {
    std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000) << 16;
    std::uint32_t exp = (h >> 10) & 0x1F;
    std::uint32_t frac = h & 0x3FF;
    std::uint32_t out;
    if (exp == 31) {
      out = sign | 0x7F800000u | (frac << 13);
    } else if (exp == 0) {
      if (frac == 0) {
        out = sign;
      } else {
        // Normalize the subnormal significand.
        int e = -1;
        do {
          ++e;
          frac <<= 1;
        } while (!(frac & 0x400));
        out = sign | (static_cast<std::uint32_t>(127 - 15 - e) << 23) |
              ((frac & 0x3FF) << 13);
      }
    } else {
      out = sign | ((exp - 15 + 127) << 23) | (frac << 13);
    }
    return std::bit_cast<float>(out);
  }

  // Round a binary64 value to the nearest binary16 (ties to even).
  static std::uint16_t round_f64_to_bits(double x) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(x);
    std::uint16_t sign = static_cast<std::uint16_t>((u >> 48) & 0x8000);
    std::int64_t dexp = static_cast<std::int64_t>((u >> 52) & 0x7FF);
    std::uint64_t dfrac = u & 0xFFFFFFFFFFFFFull;

    if (dexp == 0x7FF) {
      if (dfrac != 0) return 0x7E00;  // canonical quiet NaN
      return sign | 0x7C00;
    }
    if (dexp == 0) {
      // Double subnormals are below 2^-1022, far under half the smallest
      // binary16 subnormal; they round to zero.
      return sign;
    }

    int e = static_cast<int>(dexp) - 1023;  // exponent of the leading bit
    if (e >= 16) return sign | 0x7C00;      // |x| >= 65536

    std::uint64_t sig = (1ull << 52) | dfrac;  // 53-bit significand
    // Shift so the kept significand lands in binary16 position: 10 fraction
    // bits for normals, fewer for subnormal targets.
    int shift = (e >= -14) ? 42 : 42 + (-14 - e);
    if (shift > 63) return sign;  // below half of the smallest subnormal

    std::uint64_t q = sig >> shift;
    std::uint64_t rem = sig & ((1ull << shift) - 1);
    std::uint64_t half = 1ull << (shift - 1);
    if (rem > half || (rem == half && (q & 1))) ++q;

    std::uint16_t out;
    if (e >= -14) {
      // q in [2^10, 2^11]; the +(q - 2^10) form lets a rounded-up q carry
      // into the exponent field, which also produces infinity on overflow
      // (e.g. values in [65520, 65536) land on exponent 31).
      out = static_cast<std::uint16_t>(
          ((static_cast<std::uint32_t>(e + 15) << 10) +
           static_cast<std::uint32_t>(q - (1ull << 10))) |
          sign);
    } else {
      // Subnormal result: q <= 2^10, and q == 2^10 rolls into the smallest
      // normal encoding by construction.
      out = static_cast<std::uint16_t>(sign | q);
    }
    return out;
  }

 private:
  std::uint16_t bits_ = 0;
};

inline F16 f16_sqrt(F16 a) {
  return F16::from_f64(std::sqrt(a.to_f64()));
}

inline F16 f16_recip(F16 a) {
  return F16::from_f64(1.0 / a.to_f64());
}

namespace detail {

// Fixed binary32 exponential: 2^k * exp(r) with Cody-Waite reduction and a
// degree-5 Taylor polynomial.  Uses only IEEE-exact float operations in a
// fixed order, so the result is identical on every conforming platform.
// Relative error is a few binary32 ulps, far below binary16 resolution.
inline float exp32_fixed(float x) {
  if (x != x) return x;
  if (x > 89.0f) return std::numeric_limits<float>::infinity();
  if (x < -90.0f) return 0.0f;

  const float log2e = 1.44269504f;
  const float ln2_hi = 6.9314575195e-01f;  // high 12 bits of ln 2
  const float ln2_lo = 1.4286067653e-06f;  // ln 2 - ln2_hi

  int k = static_cast<int>(std::floor(x * log2e + 0.5f));
  float kf = static_cast<float>(k);
  float r = (x - kf * ln2_hi) - kf * ln2_lo;

  float p = 1.0f / 120.0f;
  p = p * r + 1.0f / 24.0f;
  p = p * r + 1.0f / 6.0f;
  p = p * r + 0.5f;
  p = p * r + 1.0f;
  p = p * r + 1.0f;
  return std::ldexp(p, k);
}

}  // namespace detail

// exp evaluated in binary32, rounded once to binary16 (fixed convention).
inline F16 f16_exp(F16 a) {
  return F16::from_f32(detail::exp32_fixed(a.to_f32()));
}

// 1/sqrt evaluated as two correctly rounded binary32 steps, rounded once to
// binary16 (fixed convention).
inline F16 f16_rsqrt(F16 a) {
  return F16::from_f32(1.0f / std::sqrt(a.to_f32()));
}

}  // namespace batforge
