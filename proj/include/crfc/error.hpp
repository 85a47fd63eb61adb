#pragma once

#include <stdexcept>
#include <string>

namespace crfc {

enum class ErrorCode {
  NotSkew,
  OutOfRange,
  NonFiniteResult,
  InvalidArgument,
  DegenerateGeometry,
  UnsupportedKind,
  IncompatibleStrategy,
  DegenerateSide,
  DegenerateConfiguration,
  InvertedElement,
  CollinearNodes,
  DegenerateAuxiliary,
  DegenerateDiagonals,
  StepTooLarge,
  InvalidWeightCase,
  SingularConstraintMetric,
  SingularSchur,
  SingularTangent,
  NoConvergence,
  UnknownBenchmark,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crfc
