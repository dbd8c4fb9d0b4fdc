#pragma once

#include <stdexcept>
#include <string>

namespace nvx {

enum class ErrorCode {
  Syntax,
  DuplicateUnit,
  NegativeCost,
  MissingUnit,
  UnknownIdInConflict,
  SelfConflict,
  Infeasible,
  TooLarge,
  PlanMismatch,
  UncoveredUnit,
  BadParams,
  DanglingFork,
  WindowViolation,
  Config,
  Stall,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nvx
