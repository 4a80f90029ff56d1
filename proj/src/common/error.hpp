#pragma once

#include <stdexcept>
#include <string>

namespace hoi {

enum class ErrorCode {
  Internal,
  Schema,
  Io,
  Shape,
  NonWatertight,
  BehindCamera,
  NoForeground,
  LengthMismatch,
  EmptySet,
  Degenerate,
  InsufficientSamples,
  NotPSD,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Process exit code for a failure of the given kind:
// 1 internal, 2 input/schema, 3 shape/consistency.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hoi
