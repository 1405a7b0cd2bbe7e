#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "batforge/errors.hpp"

namespace batforge {

// Bit-serial processing element with sign-bit elimination.
//
// The serial operand is a stream of ternary digits y_i in {-1, 0, +1} with
// value sum(y_i * 2^i).  Each cycle forms the partial row x * y_i in
// (N_x+1)-bit two's complement (negation via one's complement plus a carry
// into the adder), replaces the row's sign bit s by its complement, and adds
// the resulting *unsigned* row into a right-shifting partial sum.  Writing
// the row as u - 2^N_x, the constants collect into
//     product = sum(u_i * 2^i) + 2^N_x  -  2^(N_x + N_y)
// so a single one-time constant 2^N_x seeds the partial-sum register before
// cycle 0 and the trailing term is the natural two's-complement wrap of the
// final (N_x+N_y)-bit product.  No row is ever sign-extended and the adder
// is exactly N_x+1 bits wide plus carry-out.

enum class OperandKind : std::uint8_t {
  kBinaryWeight,  // single digit, +1 or -1
  kSignedAct,     // two's complement, MSB digit weighted negative
  kUnsignedAct,
};

struct TernBitStream {
  std::vector<std::int8_t> digits;  // LSB first, each in {-1, 0, +1}
  OperandKind kind = OperandKind::kBinaryWeight;

  std::int64_t value() const {
    std::int64_t v = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      v += static_cast<std::int64_t>(digits[i]) << i;
    }
    return v;
  }
};

// Expand a raw operand into its digit stream.
//  - binary weight: sign bit b -> single digit +1 (b=1) or -1 (b=0)
//  - signed activation: plain two's complement bits; the top digit carries
//    weight -2^(N-1), so it decodes as -1 when set
//  - unsigned activation: plain bits
inline TernBitStream decode_operand(std::int32_t raw, OperandKind kind,
                                    int bits) {
  TernBitStream s;
  s.kind = kind;
  switch (kind) {
    case OperandKind::kBinaryWeight:
      s.digits.push_back(raw != 0 ? 1 : -1);
      break;
    case OperandKind::kSignedAct: {
      if (bits < 1 || bits > 16) throw ShapeError("decode_operand: bad width");
      std::uint32_t u = static_cast<std::uint32_t>(raw) & ((1u << bits) - 1);
      for (int i = 0; i < bits; ++i) {
        int bit = (u >> i) & 1;
        bool msb = (i == bits - 1);
        s.digits.push_back(static_cast<std::int8_t>(msb ? -bit : bit));
      }
      break;
    }
    case OperandKind::kUnsignedAct: {
      if (bits < 1 || bits > 16) throw ShapeError("decode_operand: bad width");
      for (int i = 0; i < bits; ++i) {
        s.digits.push_back(static_cast<std::int8_t>((raw >> i) & 1));
      }
      break;
    }
  }
  return s;
}

struct PeResult {
  std::int64_t product = 0;
  std::uint64_t cycles = 0;
};

// Multiply an N_x-bit parallel operand by a ternary digit stream, one digit
// per cycle.  x must be a valid code for (x_bits, x_is_signed); 1-bit signed
// inputs use codes {-1, 0}.
inline PeResult pe_multiply(std::int32_t x, int x_bits, bool x_is_signed,
                            const TernBitStream& y) {
  if (x_bits < 1 || x_bits > 8) {
    throw ShapeError("pe_multiply: parallel width must be in [1, 8]");
  }
  if (x < (x_is_signed ? -(1 << (x_bits - 1)) : 0) ||
      x > (x_is_signed ? (1 << (x_bits - 1)) - 1 : (1 << x_bits) - 1)) {
    throw ShapeError("pe_multiply: operand outside declared code range");
  }
  const int nx = x_bits;
  const std::uint32_t row_mask = (1u << (nx + 1)) - 1;  // N_x+1 bit field
  const std::uint32_t top = 1u << nx;

  // Row patterns for y_i = +1 / -1 in the (N_x+1)-bit frame.  A negative
  // digit contributes ~x plus a carry-in of 1.
  const std::uint32_t x_pat = static_cast<std::uint32_t>(x) & row_mask;
  const std::uint32_t x_neg_pat = ~x_pat & row_mask;

  const std::size_t ny = y.digits.size();
  std::uint64_t psum = top;  // one-time initial product constant 2^N_x
  std::uint64_t tail = 0;

  for (std::size_t i = 0; i < ny; ++i) {
    const int d = y.digits[i];
    std::uint32_t row;
    std::uint32_t cin;
    if (d == 0) {
      row = 0;
      cin = 0;
    } else if (d > 0) {
      row = x_pat;
      cin = 0;
    } else {
      row = x_neg_pat;
      cin = 1;
    }
    row ^= top;  // sign-bit elimination: complement the frame's top bit

    // Adder-width invariant: both operands and the running sum stay inside
    // the N_x+1 bit field; the sum needs one carry-out bit at most.
    std::uint64_t t = psum + row + cin;
    if (psum > row_mask || t > (static_cast<std::uint64_t>(row_mask) << 1) + 1) {
      throw Error("pe_multiply: adder width invariant violated");
    }
    tail |= (t & 1) << i;
    psum = t >> 1;
  }

  // Assemble and wrap to the (N_x+N_y)-bit product field.
  const int total_bits = nx + static_cast<int>(ny);
  std::uint64_t raw = (psum << ny) | tail;
  std::uint64_t field = raw & ((1ull << total_bits) - 1);
  std::int64_t product;
  if (field & (1ull << (total_bits - 1))) {
    product = static_cast<std::int64_t>(field) - (1ll << total_bits);
  } else {
    product = static_cast<std::int64_t>(field);
  }
  return {product, ny};
}

// Sum a set of lane products the way the hardware reduction does: repeated
// 4:2 compression stages followed by one carry-propagate add.  Each stage
// halves the operand count; the value is exact at every step.  Returns the
// sum and the stage depth (compression stages plus the final adder), which
// feeds the pipeline-fill model.
struct TreeSum {
  std::int64_t sum = 0;
  int depth = 0;
};

inline TreeSum compressor_tree_sum(const std::vector<std::int64_t>& lanes) {
  std::vector<std::int64_t> cur = lanes;
  int depth = 0;
  while (cur.size() > 2) {
    std::vector<std::int64_t> next;
    next.reserve(cur.size() / 2 + 2);
    std::size_t i = 0;
    for (; i + 4 <= cur.size(); i += 4) {
      // 4:2 compressor at value level: four operands in, two out.
      next.push_back(cur[i] + cur[i + 1]);
      next.push_back(cur[i + 2] + cur[i + 3]);
    }
    if (cur.size() - i == 3) {
      // Odd remainder uses a 3:2 stage so the reduction always terminates.
      next.push_back(cur[i] + cur[i + 1]);
      next.push_back(cur[i + 2]);
    } else {
      for (; i < cur.size(); ++i) next.push_back(cur[i]);
    }
    cur = std::move(next);
    ++depth;
  }
  std::int64_t sum = 0;
  for (std::int64_t v : cur) sum += v;
  return {sum, depth + 1};
}

inline int compressor_tree_depth(std::size_t lanes) {
  int depth = 1;
  while (lanes > 2) {
    std::size_t rem = lanes % 4;
    lanes = lanes / 4 * 2 + (rem == 3 ? 2 : rem);
    ++depth;
  }
  return depth;
}

// Dot-product unit: p_pe parallel processing elements plus the reduction
// tree.  Operands longer than p_pe are folded chunk by chunk into a running
// accumulator.
struct DpuResult {
  std::int64_t dot = 0;
  std::uint64_t cycles = 0;  // chunk count * serial cycles + tree fill
};

inline DpuResult dpu_dot(const std::vector<std::int32_t>& x, int x_bits,
                         bool x_is_signed,
                         const std::vector<TernBitStream>& y,
                         std::size_t p_pe = 64) {
  if (x.size() != y.size()) throw ShapeError("dpu_dot: length mismatch");
  if (p_pe == 0) throw ShapeError("dpu_dot: p_pe must be positive");

  std::int64_t acc = 0;
  std::uint64_t serial = 0;
  for (std::size_t base = 0; base < x.size(); base += p_pe) {
    const std::size_t end = std::min(x.size(), base + p_pe);
    std::vector<std::int64_t> lanes;
    lanes.reserve(end - base);
    std::uint64_t chunk_serial = 0;
    for (std::size_t i = base; i < end; ++i) {
      PeResult p = pe_multiply(x[i], x_bits, x_is_signed, y[i]);
      lanes.push_back(p.product);
      if (p.cycles > chunk_serial) chunk_serial = p.cycles;
    }
    acc += compressor_tree_sum(lanes).sum;
    serial += chunk_serial;
  }
  return {acc, serial + static_cast<std::uint64_t>(
                            compressor_tree_depth(p_pe))};
}

}  // namespace batforge
