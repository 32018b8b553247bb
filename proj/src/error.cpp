#include "ewslab/error.hpp"

namespace ewslab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateRate: return "DegenerateRate";
    case ErrorKind::NegativeLag: return "NegativeLag";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::ZeroSigmaY: return "ZeroSigmaY";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::EmptyAnalysisWindow: return "EmptyAnalysisWindow";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::DegenerateBins: return "DegenerateBins";
    case ErrorKind::FitDegenerate: return "FitDegenerate";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ewslab
