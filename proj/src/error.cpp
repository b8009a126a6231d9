#include "precedence/error.hpp"

namespace precedence {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_state: return "invalid state";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::impossible_postselection: return "impossible postselection";
    case ErrorCode::not_informationally_complete: return "not informationally complete";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::config: return "configuration error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace precedence
