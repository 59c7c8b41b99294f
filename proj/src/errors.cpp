#include "biorth/errors.hpp"

namespace biorth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::IterationStall: return "IterationStall";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::MomentDiverges: return "MomentDiverges";
    case ErrorCode::GramSingular: return "GramSingular";
    case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorCode::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

GramSingularError::GramSingularError(std::size_t degree, const std::string& what)
    : Error(ErrorCode::GramSingular, what), degree_(degree) {}

}  // namespace biorth
