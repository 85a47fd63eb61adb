#include "crfc/error.hpp"

namespace crfc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::IncompatibleStrategy: return "IncompatibleStrategy";
    case ErrorCode::DegenerateSide: return "DegenerateSide";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::InvertedElement: return "InvertedElement";
    case ErrorCode::CollinearNodes: return "CollinearNodes";
    case ErrorCode::DegenerateAuxiliary: return "DegenerateAuxiliary";
    case ErrorCode::DegenerateDiagonals: return "DegenerateDiagonals";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::InvalidWeightCase: return "InvalidWeightCase";
    case ErrorCode::SingularConstraintMetric: return "SingularConstraintMetric";
    case ErrorCode::SingularSchur: return "SingularSchur";
    case ErrorCode::SingularTangent: return "SingularTangent";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace crfc
