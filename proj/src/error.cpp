#include "credal/error.hpp"

namespace credal {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "invalid-argument";
    case ErrorCode::InvalidCredence:
      return "invalid-credence";
    case ErrorCode::UnsupportedMeasure:
      return "unsupported-measure";
    case ErrorCode::NotImplemented:
      return "not-implemented";
    case ErrorCode::AllAtomsInfinite:
      return "all-atoms-infinite";
    case ErrorCode::NotConverged:
      return "not-converged";
  }
  return "unknown";
}

}  // namespace credal
