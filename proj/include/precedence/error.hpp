#pragma once

#include <stdexcept>
#include <string>

namespace precedence {

/// Failure categories shared by every module. The numeric values are the
/// ones surfaced through the C API (see precedence.h).
enum class ErrorCode {
  invalid_argument = 1,
  invalid_state = 2,
  dimension_mismatch = 3,
  impossible_postselection = 4,
  not_informationally_complete = 5,
  out_of_range = 6,
  io = 7,
  parse = 8,
  config = 9,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace precedence
