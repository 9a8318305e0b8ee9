#include "symsolve/error.hpp"

namespace symsolve {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kUnsymmetricInput: return "unsymmetric-input";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kNotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::kDeadlock: return "deadlock";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kStructuralMismatch: return "structural-mismatch";
    case ErrorCode::kProtocol: return "protocol-error";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace symsolve
