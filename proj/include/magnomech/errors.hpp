#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace magnomech {

enum class ErrorCode {
  kNumericalDomain,
  kDegenerateForm,
  kDegenerateConstraint,
  kCompatibility,
  kNotOnManifold,
  kImageNotInM,
  kImageNotInK,
  kParse,
  kUnknownIdentifier,
  kDivisionByZero,
  kDimensionMismatch,
  kAntisymmetryViolation,
  kSchema,
  kIo,
  kInvalidArgument,
};

std::string_view code_name(ErrorCode code);

// Base of every error raised by the library. `path` is a JSON-pointer-like
// field path for scenario errors and empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

#define MAGNOMECH_DEFINE_ERROR(Name, Code)                                    \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& message, std::string path = {})           \
        : Error(ErrorCode::Code, message, std::move(path)) {}                  \
  };

MAGNOMECH_DEFINE_ERROR(NumericalDomainError, kNumericalDomain)
MAGNOMECH_DEFINE_ERROR(DegenerateFormError, kDegenerateForm)
MAGNOMECH_DEFINE_ERROR(DegenerateConstraintError, kDegenerateConstraint)
MAGNOMECH_DEFINE_ERROR(CompatibilityError, kCompatibility)
MAGNOMECH_DEFINE_ERROR(NotOnManifoldError, kNotOnManifold)
MAGNOMECH_DEFINE_ERROR(ImageNotInM, kImageNotInM)
MAGNOMECH_DEFINE_ERROR(ImageNotInK, kImageNotInK)
MAGNOMECH_DEFINE_ERROR(UnknownIdentifier, kUnknownIdentifier)
MAGNOMECH_DEFINE_ERROR(DivisionByZero, kDivisionByZero)
MAGNOMECH_DEFINE_ERROR(DimensionMismatch, kDimensionMismatch)
MAGNOMECH_DEFINE_ERROR(AntisymmetryViolation, kAntisymmetryViolation)
MAGNOMECH_DEFINE_ERROR(SchemaError, kSchema)
MAGNOMECH_DEFINE_ERROR(IoError, kIo)
MAGNOMECH_DEFINE_ERROR(InvalidArgument, kInvalidArgument)

#undef MAGNOMECH_DEFINE_ERROR

// Expression syntax error; `position` is the 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position, std::string path = {})
      : Error(ErrorCode::kParse, message, std::move(path)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace magnomech
