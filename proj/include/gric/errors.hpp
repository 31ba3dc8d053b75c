#ifndef GRIC_ERRORS_HPP
#define GRIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gric {

// All library failures derive from Error so the CLI can map them to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input / schema problems (CLI exit code 2).
struct ParseError : Error {
  std::size_t offset;
  std::string expected;
  ParseError(std::size_t off, const std::string& exp)
      : Error("parse error at byte " + std::to_string(off) + ": expected " + exp),
        offset(off), expected(exp) {}
};

struct VariableOutOfRange : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

// Numeric / structural problems (CLI exit code 3).
struct NumericError : Error {
  using Error::Error;
};

struct JetOrderExhausted : NumericError {
  JetOrderExhausted() : NumericError("jet differentiability budget exhausted") {}
};

struct DivisionByZeroConstantTerm : NumericError {
  DivisionByZeroConstantTerm() : NumericError("division by a jet with zero constant term") {}
};

struct SqrtOfNonpositive : NumericError {
  SqrtOfNonpositive() : NumericError("sqrt of a jet with nonpositive constant term") {}
};

struct DomainError : NumericError {
  using NumericError::NumericError;
};

struct ChartMismatch : NumericError {
  ChartMismatch() : NumericError("graded elements live on different charts") {}
};

struct End2ViolationError : NumericError {
  using NumericError::NumericError;
};

struct MasterEquationFailure : NumericError {
  using NumericError::NumericError;
};

struct FrameDegenerate : NumericError {
  using NumericError::NumericError;
};

struct StepRejected : NumericError {
  using NumericError::NumericError;
};

}  // namespace gric

#endif
