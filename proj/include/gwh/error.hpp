#pragma once

#include <stdexcept>
#include <string>

namespace gwh {

enum class ErrorCode {
  ContractViolation = 1,
  DimensionMismatch,
  DegenerateInput,
  Construction,
  Rewiring,
  Config,
  Io,
  Format,
  Runtime,
};

const char* error_code_name(ErrorCode code) noexcept;

// Single exception type for the library; the code drives the C API status
// and the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gwh
