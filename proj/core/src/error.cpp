#include "kslab/error.hpp"

namespace kslab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::BracketInvalid: return "BracketInvalid";
    case ErrorKind::WindowInvalid: return "WindowInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace kslab
