#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kslab {

enum class ErrorKind {
  SymmetryViolation,
  ModelMismatch,
  GridMismatch,
  NonFinite,
  ConfigError,
  Diverged,
  BadExponent,
  DomainError,
  QuadratureFailure,
  PreconditionViolation,
  FamilyMismatch,
  BracketInvalid,
  WindowInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind; the
// CLI prints "<kind>: <message>" on one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace kslab
