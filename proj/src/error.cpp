#include "zenolab/error.hpp"

namespace zenolab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::NumericFailure: return "numeric failure";
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::DivergentRate: return "divergent rate";
    case ErrorKind::Regime: return "regime error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Resolution: return "resolution error";
    case ErrorKind::Boundary: return "boundary error";
    case ErrorKind::Endpoint: return "endpoint singularity";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::UnsupportedContinuation: return "unsupported continuation";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Window: return "window error";
  }
  return "error";
}

}  // namespace zenolab
