#pragma once

#include <stdexcept>
#include <string>

namespace schurlab {

enum class ErrorKind {
  NonFinite,
  InvalidExponent,
  ShapeMismatch,
  ShapeInvalid,
  OutOfDomain,
  DegenerateGradient,
  NoConvergence,
  NonTransverse,
  NonTransverseSample,
  RequiresC2,
  NegativeWeight,
  ZeroDirection,
  ZeroVector,
  GroupMismatch,
  ChartOverflow,
  DegenerateBasis,
  DimensionMismatch,
  InvalidArgument,
  ParseError,
  ConfigInvalid,
  IOError,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so that
// front ends (CLI exit codes, Python exceptions) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace schurlab
