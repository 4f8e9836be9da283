#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghforge {

enum class Errc {
  InvalidArgument,
  AsymmetricMatrix,
  NonzeroDiagonal,
  NonpositiveDistance,
  TriangleViolation,
  TooLarge,
  HostMismatch,
  KindMismatch,
  GridMismatch,
  OutOfBall,
  SignatureMismatch,
  SchemaError,
  DanglingLabel,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library. `indices()` carries the offending
/// matrix indices for metric-axiom failures (row, column[, via]).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::size_t> indices = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        indices_(std::move(indices)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  Errc code_;
  std::vector<std::size_t> indices_;
};

}  // namespace ghforge
