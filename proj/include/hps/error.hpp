#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hps {

enum class ErrorCode {
  Sizing,
  DimensionMismatch,
  InvalidArgument,
  EigenFailure,
  Resonance,
  SingularSchur,
  NoConvergence,
  Undefined,
  Configuration,
};

std::string_view error_code_name(ErrorCode code);

class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what, std::optional<long> leaf = std::nullopt,
              std::optional<double> reduction = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// Leaf that raised the error, when it came from a per-leaf solve.
  std::optional<long> leaf() const noexcept { return leaf_; }
  /// Residual reduction reached before giving up (NoConvergence only).
  std::optional<double> achieved_reduction() const noexcept { return reduction_; }

  SolverError with_leaf(long leaf) const;

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<long> leaf_;
  std::optional<double> reduction_;
};

void require_size(long actual, long expected, std::string_view what);

}  // namespace hps
