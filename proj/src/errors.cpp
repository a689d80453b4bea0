#include "qkdfinite/errors.hpp"

namespace qkdfinite {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain:
      return "DomainError";
    case ErrorKind::kUnphysicalInput:
      return "UnphysicalInput";
    case ErrorKind::kMissingWeight:
      return "MissingWeight";
    case ErrorKind::kInvalidWeights:
      return "InvalidWeights";
    case ErrorKind::kInfeasibleTraceOut:
      return "InfeasibleTraceOut";
    case ErrorKind::kScale:
      return "ScaleError";
    case ErrorKind::kNoPositiveRate:
      return "NoPositiveRate";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

}  // namespace qkdfinite
