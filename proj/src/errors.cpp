#include "magnomech/errors.hpp"

namespace magnomech {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumericalDomain: return "NumericalDomainError";
    case ErrorCode::kDegenerateForm: return "DegenerateFormError";
    case ErrorCode::kDegenerateConstraint: return "DegenerateConstraintError";
    case ErrorCode::kCompatibility: return "CompatibilityError";
    case ErrorCode::kNotOnManifold: return "NotOnManifold";
    case ErrorCode::kImageNotInM: return "ImageNotInM";
    case ErrorCode::kImageNotInK: return "ImageNotInK";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kUnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kAntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace magnomech
