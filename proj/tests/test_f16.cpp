#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "batforge/f16.hpp"
#include "batforge/rng.hpp"
#include "support/mpfr_f16.hpp"

using batforge::F16;
using batforge::Rng;

namespace {

bool both_nan(std::uint16_t a, std::uint16_t b) {
  return F16::from_bits(a).is_nan() && F16::from_bits(b).is_nan();
}

// Random bit pattern excluding NaNs (their payload is not pinned down).
std::uint16_t random_non_nan(Rng& rng) {
  for (;;) {
    auto b = static_cast<std::uint16_t>(rng.next_u32());
    if (!F16::from_bits(b).is_nan()) return b;
  }
}

double f16_ulp_at(double v) {
  v = std::abs(v);
  if (v < 6.103515625e-05) return 5.9604644775390625e-08;  // subnormal spacing
  int e;
  std::frexp(v, &e);
  return std::ldexp(1.0, e - 11);
}

}  // namespace

TEST_CASE("binary16 to binary32 conversion round-trips every pattern") {
  for (std::uint32_t b = 0; b < 0x10000; ++b) {
    auto h = F16::from_bits(static_cast<std::uint16_t>(b));
    if (h.is_nan()) continue;
    REQUIRE(F16::from_f32(h.to_f32()).bits() == h.bits());
  }
}

TEST_CASE("double rounding matches the independent soft-float oracle") {
  // Pinned values first.
  CHECK(F16::from_f64(0.1).bits() == 0x2E66);
  CHECK(F16::from_f64(65520.0).bits() == 0x7C00);  // rounds up to infinity
  CHECK(F16::from_f64(65519.999).bits() == 0x7BFF);
  CHECK(F16::from_f64(-0.0).bits() == 0x8000);
  CHECK(F16::from_f64(0.0).bits() == 0x0000);
  CHECK(F16::from_f64(5.9604644775390625e-08).bits() == 0x0001);   // 2^-24
  CHECK(F16::from_f64(2.98023223876953125e-08).bits() == 0x0000);  // 2^-25 tie
  CHECK(F16::from_f64(2.99e-08).bits() == 0x0001);
  CHECK(F16::from_f64(1.0 + 1.0 / 4096.0).bits() == 0x3C00);      // tie to even
  CHECK(F16::from_f64(1.0 + 3.0 / 4096.0).bits() == 0x3C02);

  Rng rng(0xF16F16);
  for (int i = 0; i < 200000; ++i) {
    // Stress the full exponent range including the subnormal boundary.
    double mag = std::ldexp(rng.uniform(0.5, 2.0),
                            static_cast<int>(rng.next_below(48)) - 30);
    double v = rng.next_u32() & 1 ? mag : -mag;
    INFO("value " << v);
    REQUIRE(F16::from_f64(v).bits() == oracle::round_double(v));
  }
}

TEST_CASE("arithmetic agrees bit-for-bit with the MPFR oracle") {
  Rng rng(0xA11CE);
  const int n = 1000000;

  SECTION("addition") {
    for (int i = 0; i < n; ++i) {
      std::uint16_t a = random_non_nan(rng), b = random_non_nan(rng);
      std::uint16_t got = (F16::from_bits(a) + F16::from_bits(b)).bits();
      std::uint16_t want = oracle::binary_op(oracle::Op::kAdd, a, b);
      if (got != want && !both_nan(got, want)) {
        INFO("a=" << a << " b=" << b);
        REQUIRE(got == want);
      }
    }
  }
  SECTION("subtraction") {
    for (int i = 0; i < n; ++i) {
      std::uint16_t a = random_non_nan(rng), b = random_non_nan(rng);
      std::uint16_t got = (F16::from_bits(a) - F16::from_bits(b)).bits();
      std::uint16_t want = oracle::binary_op(oracle::Op::kSub, a, b);
      if (got != want && !both_nan(got, want)) {
        INFO("a=" << a << " b=" << b);
        REQUIRE(got == want);
      }
    }
  }
  SECTION("multiplication") {
    for (int i = 0; i < n; ++i) {
      std::uint16_t a = random_non_nan(rng), b = random_non_nan(rng);
      std::uint16_t got = (F16::from_bits(a) * F16::from_bits(b)).bits();
      std::uint16_t want = oracle::binary_op(oracle::Op::kMul, a, b);
      if (got != want && !both_nan(got, want)) {
        INFO("a=" << a << " b=" << b);
        REQUIRE(got == want);
      }
    }
  }
  SECTION("division") {
    for (int i = 0; i < n; ++i) {
      std::uint16_t a = random_non_nan(rng), b = random_non_nan(rng);
      std::uint16_t got = (F16::from_bits(a) / F16::from_bits(b)).bits();
      std::uint16_t want = oracle::binary_op(oracle::Op::kDiv, a, b);
      if (got != want && !both_nan(got, want)) {
        INFO("a=" << a << " b=" << b);
        REQUIRE(got == want);
      }
    }
  }
  SECTION("square root and reciprocal, every pattern") {
    for (std::uint32_t b = 0; b < 0x10000; ++b) {
      auto h = static_cast<std::uint16_t>(b);
      if (F16::from_bits(h).is_nan()) continue;
      std::uint16_t gs = batforge::f16_sqrt(F16::from_bits(h)).bits();
      std::uint16_t ws = oracle::sqrt_op(h);
      if (!(gs == ws || both_nan(gs, ws))) {
        INFO("sqrt operand " << b);
        REQUIRE(gs == ws);
      }
      std::uint16_t gr = batforge::f16_recip(F16::from_bits(h)).bits();
      std::uint16_t wr = oracle::recip_op(h);
      if (!(gr == wr || both_nan(gr, wr))) {
        INFO("recip operand " << b);
        REQUIRE(gr == wr);
      }
    }
  }
}

TEST_CASE("comparisons follow IEEE semantics") {
  F16 nan = F16::from_bits(0x7E00);
  F16 one = F16::from_f64(1.0);
  CHECK_FALSE(nan == nan);
  CHECK(nan != nan);
  CHECK_FALSE(nan < one);
  CHECK_FALSE(nan > one);
  CHECK(F16::from_f64(0.0) == F16::from_f64(-0.0));
  CHECK(F16::from_f64(-1.5) < F16::from_f64(-1.0));
  CHECK(F16::from_bits(0x7C00) > F16::from_f64(65504.0));
}

TEST_CASE("exp convention tracks the real exponential within one step") {
  // exp is a fixed binary32 evaluation rounded once; it is not required to
  // be correctly rounded, but it must stay within one representable step of
  // the true value and honor the special cases.
  CHECK(batforge::f16_exp(F16::from_f64(0.0)).bits() ==
        F16::from_f64(1.0).bits());
  CHECK(batforge::f16_exp(F16::from_bits(0xFC00)).bits() == 0x0000);  // -inf
  CHECK(batforge::f16_exp(F16::from_bits(0x7C00)).bits() == 0x7C00);
  CHECK(batforge::f16_exp(F16::from_bits(0x7E00)).is_nan());

  for (std::uint32_t b = 0; b < 0x10000; ++b) {
    F16 h = F16::from_bits(static_cast<std::uint16_t>(b));
    if (!h.is_finite()) continue;
    double x = h.to_f64();
    double want = std::exp(x);
    double got = batforge::f16_exp(h).to_f64();
    if (want > 65504.0) {
      REQUIRE(batforge::f16_exp(h).is_inf());
    } else {
      REQUIRE(std::abs(got - want) <= f16_ulp_at(want) + 1e-300);
    }
  }
}

TEST_CASE("rsqrt convention tracks 1/sqrt within one step") {
  CHECK(batforge::f16_rsqrt(F16::from_f64(1.0)).bits() ==
        F16::from_f64(1.0).bits());
  CHECK(batforge::f16_rsqrt(F16::from_f64(0.0)).is_inf());
  CHECK(batforge::f16_rsqrt(F16::from_f64(-1.0)).is_nan());
  CHECK(batforge::f16_rsqrt(F16::from_bits(0x7C00)).bits() == 0x0000);

  for (std::uint32_t b = 1; b < 0x7C00; ++b) {
    F16 h = F16::from_bits(static_cast<std::uint16_t>(b));
    double want = 1.0 / std::sqrt(h.to_f64());
    double got = batforge::f16_rsqrt(h).to_f64();
    if (want > 65504.0) {
      REQUIRE(batforge::f16_rsqrt(h).to_f64() >= 65504.0);
    } else {
      REQUIRE(std::abs(got - want) <= f16_ulp_at(want));
    }
  }
}

TEST_CASE("arithmetic is deterministic across repeated evaluation") {
  Rng rng(42);
  std::vector<std::uint16_t> first;
  for (int pass = 0; pass < 2; ++pass) {
    Rng local(777);
    std::vector<std::uint16_t> bits;
    for (int i = 0; i < 1000; ++i) {
      F16 a = F16::from_bits(random_non_nan(local));
      F16 b = F16::from_bits(random_non_nan(local));
      bits.push_back((a + b).bits());
      bits.push_back((a * b).bits());
      bits.push_back((a / b).bits());
      bits.push_back(batforge::f16_exp(a).bits());
    }
    if (pass == 0) {
      first = bits;
    } else {
      REQUIRE(first == bits);
    }
  }
  (void)rng;
}
