#pragma once

#include <stdexcept>
#include <string>

namespace batforge {

// Base class for all library failures so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : Error {
  using Error::Error;
};

// Binarization of an all-zero matrix: no scale can be formed.
struct DegenerateWeightError : Error {
  using Error::Error;
};

// Ternarization left no element above threshold.
struct DegenerateTernaryError : Error {
  using Error::Error;
};

// Split coefficient left (0,1); the halves would flip signs.
struct SplitDegenerateError : Error {
  using Error::Error;
};

// NaN or other invalid value surfaced during a forward pass.
struct NumericFaultError : Error {
  using Error::Error;
};

// Hardware configuration cannot run the workload (e.g. tile exceeds buffer).
struct ConfigInfeasibleError : Error {
  using Error::Error;
};

// Design-space selection found no point satisfying the constraints.
struct NoFeasiblePointError : Error {
  explicit NoFeasiblePointError(const std::string& msg, std::string diag = {})
      : Error(msg), diagnostics(std::move(diag)) {}
  std::string diagnostics;
};

// Malformed or corrupt file.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace batforge
