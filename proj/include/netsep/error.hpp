#pragma once

#include <stdexcept>
#include <string>

namespace netsep {

// Diagnostic categories. The numeric values are shared with the C API status
// codes and the CLI exit codes.
enum class ErrorCode {
  io = 1,
  validation = 2,
  inseparable = 3,
  nonconvergence = 4,
  argument = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netsep
