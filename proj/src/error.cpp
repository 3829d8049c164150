#include "se2fm/error.hpp"

namespace se2fm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfDomain: return "out_of_domain";
    case ErrorCode::kSizeMismatch: return "size_mismatch";
    case ErrorCode::kNonPositiveCost: return "non_positive_cost";
    case ErrorCode::kMalformedHeader: return "malformed_header";
    case ErrorCode::kIoFailure: return "io_failure";
    case ErrorCode::kNotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::kConditioning: return "conditioning";
    case ErrorCode::kIterationCap: return "iteration_cap";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kEmptyResult: return "empty_result";
  }
  return "unknown";
}

}  // namespace se2fm
