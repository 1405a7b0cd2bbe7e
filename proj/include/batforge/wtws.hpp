#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "batforge/errors.hpp"
#include "batforge/quantize.hpp"
#include "batforge/tensor.hpp"

namespace batforge {

// Offline ternarization / weight-splitting pipeline.  Everything here runs in
// binary64; rounding to binary16 happens only when a split is exported as
// deployment weights.

struct TernaryLayer {
  MatF64 latent;   // the real-valued weights the ternary pattern came from
  MatF64 ternary;  // entries in {-delta, 0, +delta}
  double threshold = 0.0;
  double delta = 0.0;
};

// Threshold ternarizer: t = 0.7 * mean |W|; elements with |W| > t keep their
// sign and share one magnitude delta = mean |W| over the surviving set.
inline TernaryLayer ternarize(const MatF64& w) {
  if (w.size() == 0) throw ShapeError("ternarize: empty matrix");
  double sum_abs = 0.0;
  for (double v : w.data()) sum_abs += std::abs(v);
  const double t = 0.7 * sum_abs / static_cast<double>(w.size());

  double kept_sum = 0.0;
  std::size_t kept = 0;
  for (double v : w.data()) {
    if (std::abs(v) > t) {
      kept_sum += std::abs(v);
      ++kept;
    }
  }
  if (kept == 0) {
    throw DegenerateTernaryError("ternarize: no element above threshold");
  }

  TernaryLayer out;
  out.latent = w;
  out.threshold = t;
  out.delta = kept_sum / static_cast<double>(kept);
  out.ternary = MatF64(w.rows(), w.cols(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double v = w.data()[i];
    if (std::abs(v) > t) {
      out.ternary.data()[i] = v < 0.0 ? -out.delta : out.delta;
    }
  }
  return out;
}

// One half of a split, kept at full precision: sign pattern, exact scale and
// the per-column recombination gains.
struct SplitHalf {
  Mat<std::int8_t> signs;
  double alpha = 0.0;
  std::vector<double> sigma;  // column-wise, initialized to ones

  // Deployment view: scale rounded to binary16.
  BinWeight to_bin_weight() const {
    BinWeight b(signs.rows(), signs.cols(), F16::from_f64(alpha));
    for (std::size_t r = 0; r < signs.rows(); ++r) {
      for (std::size_t c = 0; c < signs.cols(); ++c) {
        b.set_sign(r, c, signs(r, c));
      }
    }
    return b;
  }
};

struct SplitLayer {
  MatF64 w1;  // real-valued halves, w1 + w2 == latent exactly
  MatF64 w2;
  SplitHalf bin1;  // binarized halves, bin1 + bin2 == ternary within 1e-12
  SplitHalf bin2;
  double a = 0.0;  // in (0, 1): fraction of each kept element routed to w1
  double b = 0.0;  // magnitude assigned to the sub-threshold pair

  void set_sigma1(const std::vector<double>& s) {
    if (s.size() != bin1.signs.cols()) {
      throw ShapeError("set_sigma1: length must match column count");
    }
    bin1.sigma = s;
  }
  void set_sigma2(const std::vector<double>& s) {
    if (s.size() != bin2.signs.cols()) {
      throw ShapeError("set_sigma2: length must match column count");
    }
    bin2.sigma = s;
  }
};

// Split a ternary layer into two matrices whose element sum reproduces the
// latent weights and whose *binarized* sum reproduces the ternary weights.
//
// Kept elements are divided a : (1-a); each sub-threshold element W becomes
// (b + W, -b) when positive and (b, W - b) otherwise.  The coefficients come
// from the two balance conditions alpha1 = alpha2 and alpha1 + alpha2 =
// delta, which give
//     a = (S_I + S_K - S_J) / (2 S_I)
//     b = (n * delta - S_all) / (2 (|J| + |K|))
// with S_I the kept absolute mass, S_J / S_K the positive / non-positive
// sub-threshold masses and S_all their total.  Latent zeros are routed with
// the non-positive group; that keeps the alpha1 + alpha2 = delta accounting
// exact.  When every element survives the threshold, b is unused and a
// reduces to 1/2.
inline SplitLayer tws_split(const TernaryLayer& layer) {
  const MatF64& w = layer.latent;
  const MatF64& tern = layer.ternary;
  if (w.rows() != tern.rows() || w.cols() != tern.cols()) {
    throw ShapeError("tws_split: latent/ternary shape mismatch");
  }

  double s_kept = 0.0, s_pos = 0.0, s_neg = 0.0, s_all = 0.0;
  std::size_t n_kept = 0, n_zero = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double v = w.data()[i];
    s_all += std::abs(v);
    if (tern.data()[i] != 0.0) {
      s_kept += std::abs(v);
      ++n_kept;
    } else {
      ++n_zero;
      if (v > 0.0) {
        s_pos += v;
      } else {
        s_neg += -v;
      }
    }
  }
  if (n_kept == 0) {
    throw DegenerateTernaryError("tws_split: ternary pattern is all zero");
  }

  const double n = static_cast<double>(w.size());
  const double delta = layer.delta;
  const double a = (s_kept + s_neg - s_pos) / (2.0 * s_kept);
  const double b =
      n_zero == 0 ? 0.0 : (n * delta - s_all) / (2.0 * static_cast<double>(n_zero));
  if (!(a > 0.0 && a < 1.0)) {
    throw SplitDegenerateError("tws_split: split coefficient outside (0, 1)");
  }

  SplitLayer out;
  out.a = a;
  out.b = b;
  out.w1 = MatF64(w.rows(), w.cols());
  out.w2 = MatF64(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double v = w.data()[i];
    if (tern.data()[i] != 0.0) {
      out.w1.data()[i] = a * v;
      out.w2.data()[i] = (1.0 - a) * v;
    } else if (v > 0.0) {
      out.w1.data()[i] = b + v;
      out.w2.data()[i] = -b;
    } else {
      out.w1.data()[i] = b;
      out.w2.data()[i] = -b + v;
    }
  }

  auto bin = [](const MatF64& half) {
    SignSplit s = binarize_signs(half);
    SplitHalf h;
    h.signs = std::move(s.signs);
    h.alpha = s.alpha;
    h.sigma.assign(half.cols(), 1.0);
    return h;
  };
  out.bin1 = bin(out.w1);
  out.bin2 = bin(out.w2);
  return out;
}

// Largest absolute difference between binarize(w1) + binarize(w2) and the
// ternary matrix; the governing identity of the split.
inline double split_identity_residual(const SplitLayer& s,
                                      const TernaryLayer& layer) {
  double worst = 0.0;
  for (std::size_t r = 0; r < layer.ternary.rows(); ++r) {
    for (std::size_t c = 0; c < layer.ternary.cols(); ++c) {
      double rec = s.bin1.alpha * s.bin1.signs(r, c) +
                   s.bin2.alpha * s.bin2.signs(r, c);
      double d = std::abs(rec - layer.ternary(r, c));
      if (d > worst) worst = d;
    }
  }
  return worst;
}

// Forward through a split layer with column recombination:
//   Y = X * (alpha1 * signs1 * diag(sigma1) + alpha2 * signs2 * diag(sigma2))
// evaluated in binary64.  With all-ones sigmas this equals X times the
// ternary matrix up to the split identity residual.
inline MatF64 wtws_forward(const MatF64& x, const SplitLayer& s) {
  const std::size_t k = x.cols();
  const std::size_t m = s.bin1.signs.cols();
  if (k != s.bin1.signs.rows()) {
    throw ShapeError("wtws_forward: inner dimensions disagree");
  }
  MatF64 y(x.rows(), m, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double w = s.bin1.alpha * s.bin1.signs(i, c) * s.bin1.sigma[c] +
                   s.bin2.alpha * s.bin2.signs(i, c) * s.bin2.sigma[c];
        acc += x(r, i) * w;
      }
      y(r, c) = acc;
    }
  }
  return y;
}

}  // namespace batforge
