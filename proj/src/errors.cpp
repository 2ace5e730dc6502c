#include "eulerlab/errors.hpp"

namespace eulerlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::EmptyDomain: return "empty-domain";
    case ErrorKind::Ambiguity: return "ambiguity";
    case ErrorKind::UnsupportedTopology: return "unsupported-topology";
    case ErrorKind::InconsistentField: return "inconsistent-field";
    case ErrorKind::LevelNotAttained: return "level-not-attained";
    case ErrorKind::InteriorCriticalPoint: return "interior-critical-point";
    case ErrorKind::VanishingField: return "vanishing-field-on-curve";
    case ErrorKind::UndersampledCurve: return "undersampled-curve";
    case ErrorKind::SelfIntersection: return "self-intersection";
    case ErrorKind::StagnationPoint: return "stagnation-point";
    case ErrorKind::HypothesisViolation: return "hypothesis-violation";
    case ErrorKind::SingularNode: return "singular-node";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::ProfileFailure: return "profile-failure";
    case ErrorKind::DomainError: return "domain-error";
  }
  return "unknown";
}

}  // namespace eulerlab
