#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zenolab {

enum class ErrorKind {
  InvalidInput,
  NumericFailure,
  ContractViolation,
  DivergentRate,
  Regime,
  Configuration,
  Resolution,
  Boundary,
  Endpoint,
  Domain,
  UnsupportedContinuation,
  Consistency,
  Window,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that front ends can
/// map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zenolab
