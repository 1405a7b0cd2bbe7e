#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace batforge {

// Philox4x32-10 counter-based generator.  State is (128-bit counter, 64-bit
// key); the key is the seed, so identical seeds yield identical streams on
// any platform and independent streams come from distinct seeds or counter
// offsets rather than from shared mutable state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    ctr_ = {0, 0, static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
  }

  std::uint32_t next_u32() {
    if (have_ == 0) {
      block_ = philox(ctr_, key_);
      bump_counter();
      have_ = 4;
    }
    return block_[4 - have_--];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

 private:
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> c,
                                             std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
      std::array<std::uint32_t, 4> n;
      n[0] = static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0];
      n[1] = static_cast<std::uint32_t>(p1);
      n[2] = static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1];
      n[3] = static_cast<std::uint32_t>(p0);
      c = n;
      k[0] += W0;
      k[1] += W1;
    }
    return c;
  }

  void bump_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++ctr_[i] != 0) break;
    }
  }

  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_{};
  int have_ = 0;
};

// n independent draws from N(mean, variance) via Box-Muller in binary64.
inline std::vector<double> gaussian_sample(Rng& rng, double mean,
                                           double variance, std::size_t n) {
  if (variance < 0.0) {
    throw std::invalid_argument("gaussian_sample: negative variance");
  }
  std::vector<double> out(n, mean);
  if (variance == 0.0 || n == 0) return out;

  const double sd = std::sqrt(variance);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t i = 0; i < n; i += 2) {
    double u1 = 1.0 - rng.next_double();  // (0, 1]
    double u2 = rng.next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = mean + sd * (r * std::cos(two_pi * u2));
    if (i + 1 < n) out[i + 1] = mean + sd * (r * std::sin(two_pi * u2));
  }
  return out;
}

}  // namespace batforge
