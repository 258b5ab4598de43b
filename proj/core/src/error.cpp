#include "nearlattice/error.hpp"

namespace nearlattice {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NonEmbeddable: return "NON_EMBEDDABLE";
    case ErrorCode::DegenerateReference: return "DEGENERATE_REFERENCE";
    case ErrorCode::DegenerateFace: return "DEGENERATE_FACE";
    case ErrorCode::ScaleOutOfRange: return "SCALE_OUT_OF_RANGE";
    case ErrorCode::InadmissibleStart: return "INADMISSIBLE_START";
    case ErrorCode::RadiusTooLarge: return "RADIUS_TOO_LARGE";
    case ErrorCode::TrialsExhausted: return "TRIALS_EXHAUSTED";
    case ErrorCode::NotEnumerable: return "NOT_ENUMERABLE";
    case ErrorCode::PreconditionViolated: return "PRECONDITION_VIOLATED";
    case ErrorCode::ConstructionFailure: return "CONSTRUCTION_FAILURE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::VersionMismatch: return "VERSION_MISMATCH";
    case ErrorCode::SpecError: return "SPEC_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace nearlattice
