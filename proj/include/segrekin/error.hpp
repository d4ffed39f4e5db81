#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace segrekin {

enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  GridMismatch = 2,
  StabilityViolation = 3,
  NotConverged = 4,
  Positivity = 5,
  Io = 6,
  Config = 7,
  Internal = 8,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal conditions (truncation, flooring) are collected here so callers
// and the CLI can surface them without interrupting the computation.
void emit_warning(const std::string& message);
std::vector<std::string> take_warnings();

}  // namespace segrekin
