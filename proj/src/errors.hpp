#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tdlsys {

// Error categories mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  not_ergodic = 3,
  regime = 4,  // inputs outside the step-size/reward regime the bounds need
  numeric = 5,
  io = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace tdlsys
