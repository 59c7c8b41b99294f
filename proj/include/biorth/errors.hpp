#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biorth {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  NonFiniteSample,
  SingularMatrix,
  IterationStall,
  NotPositiveDefinite,
  InvalidSpec,
  DomainError,
  MomentDiverges,
  GramSingular,
  UnsupportedSpec,
  Inconclusive,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the leading moment minor of order `degree` vanishes.
class GramSingularError : public Error {
 public:
  GramSingularError(std::size_t degree, const std::string& what);

  std::size_t degree() const noexcept { return degree_; }

 private:
  std::size_t degree_;
};

}  // namespace biorth
