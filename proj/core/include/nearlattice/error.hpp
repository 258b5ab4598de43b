#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nearlattice {

enum class ErrorCode {
  InvalidArgument,
  NonEmbeddable,
  DegenerateReference,
  DegenerateFace,
  ScaleOutOfRange,
  InadmissibleStart,
  RadiusTooLarge,
  TrialsExhausted,
  NotEnumerable,
  PreconditionViolated,
  ConstructionFailure,
  ParseError,
  VersionMismatch,
  SpecError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nearlattice
