#include "schurlab/errors.hpp"

namespace schurlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ShapeInvalid: return "ShapeInvalid";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonTransverse: return "NonTransverse";
    case ErrorKind::NonTransverseSample: return "NonTransverseSample";
    case ErrorKind::RequiresC2: return "RequiresC2";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::ZeroDirection: return "ZeroDirection";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::GroupMismatch: return "GroupMismatch";
    case ErrorKind::ChartOverflow: return "ChartOverflow";
    case ErrorKind::DegenerateBasis: return "DegenerateBasis";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace schurlab
