#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ewslab {

enum class ErrorKind {
  DegenerateRate,
  NegativeLag,
  SingularCovariance,
  ZeroSigmaY,
  PreconditionViolated,
  NonFiniteState,
  EmptyAnalysisWindow,
  SeriesTooShort,
  ZeroVariance,
  DegenerateBins,
  FitDegenerate,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace ewslab
