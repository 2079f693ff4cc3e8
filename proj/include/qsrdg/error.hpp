#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qsrdg {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularMatrix,
  NonFiniteEvaluation,
  ZeroDirection,
  NewtonDidNotConverge,
  GridMismatch,
  AreNotConverged,
  NotStabilizing,
  UnknownExample,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Integration failures also
/// carry the index of the failing step.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(message), code_(code), step_(step) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> step_;
};

}  // namespace qsrdg
