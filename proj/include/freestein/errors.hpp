#pragma once

#include <stdexcept>
#include <string>

namespace freestein {

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  kOther = 1,
  kInadmissible = 2,
  kInvalidState = 3,
  kBudgetExceeded = 4,
};

/// Structured error: a category, a message, and the offending field (may be empty).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInadmissible: return "inadmissible";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
    case ErrorCode::kOther: break;
  }
  return "error";
}

}  // namespace freestein
