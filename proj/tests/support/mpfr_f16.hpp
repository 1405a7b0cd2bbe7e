#pragma once

#include <mpfr.h>

#include <cstdint>

#include "batforge/f16.hpp"

// Independent IEEE binary16 arithmetic built on MPFR: precision 11 with the
// exponent range clamped to [-23, 16] and subnormalization after every
// operation.  This shares no code with the library's binary16 path, so a
// bit-for-bit match is meaningful evidence that the library rounds
// correctly.
namespace oracle {

class F16Scope {
 public:
  F16Scope() {
    old_emin_ = mpfr_get_emin();
    old_emax_ = mpfr_get_emax();
    mpfr_set_emin(-23);
    mpfr_set_emax(16);
  }
  ~F16Scope() {
    mpfr_set_emin(old_emin_);
    mpfr_set_emax(old_emax_);
  }

 private:
  mpfr_exp_t old_emin_;
  mpfr_exp_t old_emax_;
};

// Result of an MPFR op as binary16 bits.  The value coming out of MPFR is
// exactly representable in binary16, so converting through double is exact.
inline std::uint16_t to_bits(mpfr_t r, int ternary) {
  ternary = mpfr_subnormalize(r, ternary, MPFR_RNDN);
  (void)ternary;
  double d = mpfr_get_d(r, MPFR_RNDN);
  return batforge::F16::from_f64(d).bits();
}

enum class Op { kAdd, kSub, kMul, kDiv };

inline std::uint16_t binary_op(Op op, std::uint16_t a, std::uint16_t b) {
  F16Scope scope;
  mpfr_t x, y, r;
  mpfr_inits2(11, x, y, r, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(x, batforge::F16::from_bits(a).to_f64(), MPFR_RNDN);
  mpfr_set_d(y, batforge::F16::from_bits(b).to_f64(), MPFR_RNDN);
  int t = 0;
  switch (op) {
    case Op::kAdd: t = mpfr_add(r, x, y, MPFR_RNDN); break;
    case Op::kSub: t = mpfr_sub(r, x, y, MPFR_RNDN); break;
    case Op::kMul: t = mpfr_mul(r, x, y, MPFR_RNDN); break;
    case Op::kDiv: t = mpfr_div(r, x, y, MPFR_RNDN); break;
  }
  std::uint16_t bits = to_bits(r, t);
  mpfr_clears(x, y, r, static_cast<mpfr_ptr>(nullptr));
  return bits;
}

inline std::uint16_t sqrt_op(std::uint16_t a) {
  F16Scope scope;
  mpfr_t x, r;
  mpfr_inits2(11, x, r, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(x, batforge::F16::from_bits(a).to_f64(), MPFR_RNDN);
  int t = mpfr_sqrt(r, x, MPFR_RNDN);
  std::uint16_t bits = to_bits(r, t);
  mpfr_clears(x, r, static_cast<mpfr_ptr>(nullptr));
  return bits;
}

inline std::uint16_t recip_op(std::uint16_t a) {
  F16Scope scope;
  mpfr_t x, r;
  mpfr_inits2(11, x, r, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(x, batforge::F16::from_bits(a).to_f64(), MPFR_RNDN);
  int t = mpfr_ui_div(r, 1, x, MPFR_RNDN);
  std::uint16_t bits = to_bits(r, t);
  mpfr_clears(x, r, static_cast<mpfr_ptr>(nullptr));
  return bits;
}

// Round an arbitrary double to binary16.
inline std::uint16_t round_double(double v) {
  F16Scope scope;
  mpfr_t r;
  mpfr_init2(r, 11);
  int t = mpfr_set_d(r, v, MPFR_RNDN);
  t = mpfr_check_range(r, t, MPFR_RNDN);
  std::uint16_t bits = to_bits(r, t);
  mpfr_clear(r);
  return bits;
}

}  // namespace oracle
