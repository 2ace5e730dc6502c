#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eulerlab {

/// Failure categories surfaced by the library. The CLI maps them to exit codes.
enum class ErrorKind {
  InvalidArgument,
  EmptyDomain,
  Ambiguity,
  UnsupportedTopology,
  InconsistentField,
  LevelNotAttained,
  InteriorCriticalPoint,
  VanishingField,
  UndersampledCurve,
  SelfIntersection,
  StagnationPoint,
  HypothesisViolation,
  SingularNode,
  ConvergenceFailure,
  ProfileFailure,
  DomainError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace eulerlab
