#include "nullcore/error.hpp"

namespace nullcore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsafeFrontier: return "UnsafeFrontier";
    case ErrorCode::UnsafeNegation: return "UnsafeNegation";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NullInRule: return "NullInRule";
    case ErrorCode::ExistentialInBody: return "ExistentialInBody";
    case ErrorCode::VariableInFact: return "VariableInFact";
    case ErrorCode::TrivialQuery: return "TrivialQuery";
    case ErrorCode::NoHomomorphism: return "NoHomomorphism";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::UnsafeQueryInChaseMode: return "UnsafeQueryInChaseMode";
    case ErrorCode::InvalidTransformation: return "InvalidTransformation";
    case ErrorCode::NoStratification: return "NoStratification";
  }
  return "Unknown";
}

}  // namespace nullcore
