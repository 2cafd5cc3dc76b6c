#pragma once

#include <stdexcept>
#include <string>

namespace bata {

enum class ErrorCode {
  dimension_mismatch,
  not_positive_semidefinite,
  invalid_argument,
  step_length_violation,
  singular_system,
  no_dividing_index,
  missing_callback,
  io_failure,
  budget_invalid,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::not_positive_semidefinite: return "not_positive_semidefinite";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::step_length_violation: return "step_length_violation";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::no_dividing_index: return "no_dividing_index";
    case ErrorCode::missing_callback: return "missing_callback";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::budget_invalid: return "budget_invalid";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace bata
