#pragma once

#include <stdexcept>
#include <string>

namespace dslr {

enum class ErrorCode {
  InvalidArgument,
  Overflow,
  Shape,
  Range,
  Parse,
  Validation,
  UnknownNetwork,
  Io,
  Resource,
  State,
};

// Every failure inside the core is reported with one of these; the C API maps
// the code onto dslr_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dslr
