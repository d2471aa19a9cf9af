#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lvr {

enum class ErrorCode {
  EmptyInput,
  EmptyIndex,
  DimensionMismatch,
  IndexOutOfRange,
  NonPositiveSaliency,
  InsufficientCorrespondences,
  DegenerateGeometry,
  InvalidArgument,
  Format,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every library operation. The CLI maps it to exit code 1.
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

}  // namespace lvr
