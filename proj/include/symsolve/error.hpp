#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symsolve {

enum class ErrorCode {
  kParse,
  kUnsymmetricInput,
  kIndexOutOfRange,
  kNotPositiveDefinite,
  kDeadlock,
  kDimensionMismatch,
  kStructuralMismatch,
  kProtocol,
  kIo,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the library. `index()` carries the offending
// global column for kNotPositiveDefinite and is -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::int64_t index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::int64_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::int64_t index_;
};

}  // namespace symsolve
